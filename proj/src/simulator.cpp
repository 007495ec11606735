#include "levyfluct/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <variant>

#include "levyfluct/errors.hpp"

namespace levyfluct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void need(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// one claim drawn from the distribution; mixtures with a negative
// component weight and tabulated densities go through inverse-transform
// bisection on the survival function
double sample_claim(const ClaimDist& d, PathRng& rng) {
  if (const auto* e = std::get_if<ExpClaims>(&d)) return rng.exponential(e->eta);
  if (const auto* m = std::get_if<MixedExpClaims>(&d)) {
    bool direct = true;
    for (double w : m->weights) direct = direct && w >= 0.0;
    if (direct) {
      double u = rng.u01();
      for (std::size_t i = 0; i + 1 < m->weights.size(); ++i) {
        if (u < m->weights[i]) return rng.exponential(m->rates[i]);
        u -= m->weights[i];
      }
      return rng.exponential(m->rates.back());
    }
  }
  const double u = 1.0 - rng.u01();  // target tail level in (0, 1]
  double hi = 1.0;
  int guard = 0;
  while (claim_tail(d, hi) > u && ++guard < 64) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    (claim_tail(d, mid) > u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Tracker {
  PathFunctionals f;
  double S = 0.0, I = 0.0;  // running extrema
  bool done = false;
};

// the path just went strictly under zero; for the first passage this is
// ruin and the pre-event extrema are frozen. Callers pass the pre-event
// running extrema state (the infimum update with the post-event position
// happens after).
void cross_down(Tracker& tr, double t, double y, double z, bool creeping) {
  if (!tr.f.ruined) {
    tr.f.ruined = true;
    tr.f.creeping = creeping;
    tr.f.T = t;
    tr.f.surplus = y;
    tr.f.deficit = z;
    tr.f.sup_T = tr.S;
    tr.f.inf_T = tr.I;
  }
}

// the path came back up to zero; the first time after ruin this is the
// recovery, and every occurrence moves the last-passage snapshot
void cross_up(Tracker& tr, double t) {
  if (tr.f.ruined && !(tr.f.T0 < kInf)) {
    tr.f.T0 = t;
    tr.f.sup_T0 = tr.S;
    tr.f.inf_T0 = tr.I;
  }
  tr.f.l = t;
  tr.f.sup_l = tr.S;
  tr.f.inf_l = tr.I;
}

// exact event-driven run for bounded variation: between exponential jump
// times the path rises linearly, so barrier crossings have closed times
void run_bv(const LevyModel& m, double x, const SimPlan& plan, double level,
            PathRng& rng, Tracker& tr) {
  const double c = m.drift;
  const auto& cp = std::get<CompoundPoisson>(m.jumps);
  const double t_cut = plan.t_max > 0.0 ? plan.t_max : kInf;
  double t = 0.0, X = x;
  while (!tr.done) {
    double dt = rng.exponential(cp.rate);
    bool jump = true;
    if (t + dt >= t_cut) {
      dt = t_cut - t;
      jump = false;
    }
    const double Xe = X + c * dt;
    if (X < 0.0) {
      if (Xe >= 0.0) {
        const double tc = t + (0.0 - X) / c;
        tr.f.D += tc - t;
        cross_up(tr, tc);
      } else {
        tr.f.D += dt;
      }
    }
    if (Xe >= level) {
      tr.S = std::max(tr.S, level);
      tr.done = true;
      break;
    }
    tr.S = std::max(tr.S, Xe);
    t += dt;
    X = Xe;
    if (!jump) {
      tr.f.censored = true;
      tr.done = true;
      break;
    }
    const double size = sample_claim(cp.claims, rng);
    const double Xp = X - size;
    if (X >= 0.0 && Xp < 0.0) cross_down(tr, t, X, -Xp, false);
    X = Xp;
    tr.I = std::min(tr.I, X);
  }
}

// Euler run between exactly-simulated jump epochs for models with a
// Gaussian part; the bridge correction samples the within-step minimum
// and maximum from their exact conditional laws, which is what catches
// barrier crossings the grid would miss. Crossing times inside a step are
// interpolated (midpoint when only the bridge saw the event), an O(h)
// approximation, and the time below zero is booked from the same
// interpolated times so the recorded functionals stay consistent.
void run_diffusion(const LevyModel& m, double x, const SimPlan& plan,
                   double level, PathRng& rng, Tracker& tr) {
  const double c = m.drift;
  const auto* cp = std::get_if<CompoundPoisson>(&m.jumps);
  const double t_cut = plan.t_max > 0.0 ? plan.t_max : kInf;
  double t = 0.0, X = x;
  while (!tr.done) {
    double dt = cp ? rng.exponential(cp->rate) : kInf;
    bool jump = cp != nullptr;
    if (t + dt >= t_cut) {
      dt = t_cut - t;
      jump = false;
    }
    double left = dt;
    while (left > 0.0 && !tr.done) {
      const double hs = std::min(plan.step, left);
      left -= hs;
      const double sd = m.sigma * std::sqrt(hs);
      const double X1 = X + c * hs + sd * rng.normal();
      double mn = std::min(X, X1);
      double mx = std::max(X, X1);
      if (plan.bridge) {
        const double reach = 5.0 * sd;
        if (mn - reach < tr.I || (mn > 0.0 && mn - reach < 0.0)) {
          const double g = std::sqrt((X1 - X) * (X1 - X) -
                                     2.0 * sd * sd * std::log1p(-rng.u01()));
          mn = 0.5 * (X + X1 - g);
        }
        if (mx + reach > tr.S || (mx < 0.0 && mx + reach > 0.0)) {
          const double g = std::sqrt((X1 - X) * (X1 - X) -
                                     2.0 * sd * sd * std::log1p(-rng.u01()));
          mx = 0.5 * (X + X1 + g);
        }
      }
      if (X >= 0.0) {
        if (mn < 0.0) {
          // continuous crossing: creeping if this is the first passage
          const double tau =
              X1 < 0.0 ? t + hs * (X > X1 ? X / (X - X1) : 0.5)
                       : t + 0.5 * hs;
          cross_down(tr, tau, 0.0, 0.0, true);
          tr.I = std::min(tr.I, mn);
          if (X1 >= 0.0) {
            // dip contained in the step: the endpoint rule below sees
            // nothing, so book the interval the crossing times imply
            tr.f.D += (t + hs) - tau;
            cross_up(tr, t + hs);
          }
        }
      } else {
        if (mx > 0.0) {
          tr.I = std::min(tr.I, mn);
          const double tau =
              X1 >= 0.0 ? t + hs * (X / (X - X1)) : t + 0.5 * hs;
          cross_up(tr, tau);
        }
      }
      if (X < 0.0 && X1 < 0.0)
        tr.f.D += hs;
      else if (X < 0.0)
        tr.f.D += hs * (X / (X - X1));
      else if (X1 < 0.0)
        tr.f.D += hs * (1.0 - X / (X - X1));
      tr.S = std::max(tr.S, mx);
      tr.I = std::min(tr.I, mn);
      t += hs;
      X = X1;
      if (X >= level) tr.done = true;
    }
    if (tr.done) break;
    if (!jump) {
      tr.f.censored = true;
      tr.done = true;
      break;
    }
    const double size = sample_claim(cp->claims, rng);
    const double Xp = X - size;
    if (X >= 0.0 && Xp < 0.0) cross_down(tr, t, X, -Xp, false);
    X = Xp;
    tr.I = std::min(tr.I, X);
  }
}

bool in_box(const EventBox& b, double y, double z, double S, double I) {
  return y >= b.y_lo && y <= b.y_hi && z >= b.z_lo && z <= b.z_hi &&
         S <= b.sup_cap && I > b.inf_floor;
}

// contribution of one finished path. A censored path whose functional is
// still open contributes zero and its worst possible weight goes into the
// bound instead.
double weight_of(const PathFunctionals& f, const WeightSpec& ws, double t_cut,
                 double* bound) {
  *bound = 0.0;
  switch (ws.kind) {
    case WeightKind::DiscountedRuin:
      if (f.ruined)
        return in_box(ws.box, f.surplus, f.deficit, f.sup_T, f.inf_T)
                   ? std::exp(-ws.q * f.T)
                   : 0.0;
      if (f.censored) *bound = std::exp(-ws.q * t_cut);
      return 0.0;
    case WeightKind::DiscountedRecovery:
      if (f.ruined && f.T0 < kInf)
        return in_box(ws.box, f.surplus, f.deficit, f.sup_T0, f.inf_T0)
                   ? std::exp(-ws.q * f.T - ws.beta * (f.T0 - f.T))
                   : 0.0;
      if (f.censored)
        *bound = f.ruined
                     ? std::exp(-ws.q * f.T - ws.beta * (t_cut - f.T))
                     : std::exp(-ws.q * t_cut);
      return 0.0;
    case WeightKind::DiscountedLastPassage:
      if (f.ruined && !f.censored)
        return in_box(ws.box, f.surplus, f.deficit, f.sup_l, f.inf_l)
                   ? std::exp(-ws.q * f.T - ws.beta * (f.l - f.T))
                   : 0.0;
      if (f.censored) {
        if (f.ruined) {
          const double l_min = std::max(f.l, f.T);
          *bound = std::exp(-ws.q * f.T - ws.beta * (l_min - f.T));
        } else {
          *bound = std::exp(-ws.q * t_cut);
        }
      }
      return 0.0;
    case WeightKind::DurationTransform:
      if (!f.censored) return std::exp(-ws.beta * f.D);
      *bound = std::exp(-ws.beta * f.D);
      return 0.0;
  }
  return 0.0;
}

}  // namespace

struct Simulator::Block {
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_bound = 0.0;
  std::size_t n_eff = 0;
  std::size_t n_cens = 0;
};

Simulator::Simulator(LevyModel m) : model_(std::move(m)) {
  model_.validate();
  if (mean_drift(model_) > 0.0)
    w0_ = std::make_unique<ScaleEvaluator>(model_, 0.0);
}

double Simulator::adaptive_level(double bound) const {
  need(bound > 0.0 && bound < 1.0,
       "adaptive_level: bound must sit strictly inside (0, 1)");
  need(w0_ != nullptr, "adaptive_level: requires positive mean drift");
  const double md = mean_drift(model_);
  auto psi = [&](double L) { return 1.0 - std::min(1.0, md * w0_->W(L)); };
  double hi = 1.0;
  int guard = 0;
  while (psi(hi) > bound && ++guard < 60) hi *= 2.0;
  need(guard < 60, "adaptive_level: bound unreachable");
  double lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) > bound ? lo : hi) = mid;
  }
  return hi;
}

PathFunctionals Simulator::run_one(double x, const SimPlan& plan, double level,
                                   std::uint64_t path_id) const {
  PathRng rng(plan.seed, path_id);
  Tracker tr;
  tr.S = tr.I = x;
  if (x >= level) {
    tr.done = true;
    return tr.f;
  }
  if (model_.sigma == 0.0)
    run_bv(model_, x, plan, level, rng, tr);
  else
    run_diffusion(model_, x, plan, level, rng, tr);
  return tr.f;
}

PathFunctionals Simulator::simulate_path(double x, const SimPlan& plan,
                                         std::uint64_t path_id) const {
  need(x >= 0.0, "simulate_path: start must be nonnegative");
  need(plan.step > 0.0, "simulate_path: step must be positive");
  const double level =
      w0_ != nullptr ? adaptive_level(plan.level_bound) : kInf;
  need(level < kInf || plan.t_max > 0.0,
       "simulate_path: a sinking model needs a fixed horizon");
  return run_one(x, plan, level, path_id);
}

void Simulator::run_block(double x, const SimPlan& plan,
                          const WeightSpec& weight, double level,
                          std::size_t lo, std::size_t hi, Block& out) const {
  const double t_cut = plan.t_max > 0.0 ? plan.t_max : kInf;
  for (std::size_t pid = lo; pid < hi; ++pid) {
    const PathFunctionals f = run_one(x, plan, level, pid);
    double bound = 0.0;
    const double w = weight_of(f, weight, t_cut, &bound);
    out.sum_w += w;
    out.sum_w2 += w * w;
    out.sum_bound += bound;
    if (w != 0.0) ++out.n_eff;
    if (f.censored) ++out.n_cens;
  }
}

EstimateResult Simulator::estimate(double x, const SimPlan& plan,
                                   const WeightSpec& weight) const {
  need(x >= 0.0, "estimate: start must be nonnegative");
  need(plan.n_paths >= 1, "estimate: need at least one path");
  need(plan.step > 0.0, "estimate: step must be positive");
  double level = kInf;
  double level_resid = 0.0;
  if (w0_ != nullptr) {
    level = adaptive_level(plan.level_bound);
    level_resid = plan.level_bound;
  } else {
    need(plan.t_max > 0.0, "estimate: a sinking model needs a fixed horizon");
  }

  const std::size_t n = plan.n_paths;
  constexpr std::size_t kBlock = 4096;
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<Block> blocks(nb);
  const unsigned nthreads =
      std::min<unsigned>(std::max(1u, plan.threads), static_cast<unsigned>(nb));
  auto worker = [&](unsigned tid) {
    for (std::size_t bi = tid; bi < nb; bi += nthreads)
      run_block(x, plan, weight, level, bi * kBlock,
                std::min(n, (bi + 1) * kBlock), blocks[bi]);
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned tid = 0; tid < nthreads; ++tid)
      pool.emplace_back(worker, tid);
    for (auto& th : pool) th.join();
  }

  // blocks combine in index order, so the sums do not depend on how many
  // workers ran them
  double sw = 0.0, sw2 = 0.0, sb = 0.0;
  std::size_t ne = 0, nc = 0;
  for (const Block& b : blocks) {
    sw += b.sum_w;
    sw2 += b.sum_w2;
    sb += b.sum_bound;
    ne += b.n_eff;
    nc += b.n_cens;
  }
  if (ne == 0)
    throw NumericalError("estimate: no effective samples for the event", 0.0);

  EstimateResult r;
  r.mean = sw / static_cast<double>(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const double var =
      std::max(0.0, (sw2 - sw * sw / static_cast<double>(n)) / denom);
  r.std_error = std::sqrt(var / static_cast<double>(n));
  r.n_effective = ne;
  r.censored_fraction = static_cast<double>(nc) / static_cast<double>(n);
  r.bias_bound = sb / static_cast<double>(n) + level_resid;
  return r;
}

}  // namespace levyfluct
