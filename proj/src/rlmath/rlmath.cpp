#include "tleague/rlmath/rlmath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tleague::rlmath {

namespace {

void CheckLengths(std::size_t l, std::initializer_list<std::size_t> sizes) {
  if (l == 0) throw std::invalid_argument("segment length must be >= 1");
  for (std::size_t s : sizes)
    if (s != l) throw std::invalid_argument("array length mismatch");
}

// Normalized advantages (mean 0, std 1 with floor) when enabled.
std::vector<double> EffectiveAdvantages(const Minibatch& batch, bool normalize) {
  std::vector<double> adv(batch.samples.size());
  for (std::size_t i = 0; i < adv.size(); ++i) {
    adv[i] = batch.samples[i].advantage;
    if (!std::isfinite(adv[i])) throw std::invalid_argument("non-finite advantage");
  }
  if (!normalize || adv.size() < 2) return adv;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  double sd = std::max(std::sqrt(var), 1e-8);
  for (double& a : adv) a = (a - mean) / sd;
  return adv;
}

double Entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace

std::vector<double> LambdaReturn(std::span<const double> rewards,
                                 std::span<const double> values, double bootstrap,
                                 std::span<const bool> dones, double gamma, double lam) {
  const std::size_t l = rewards.size();
  CheckLengths(l, {values.size(), dones.size()});
  std::vector<double> ret(l);
  double next_value = bootstrap;
  double next_ret = bootstrap;
  for (std::size_t i = l; i-- > 0;) {
    double nonterm = dones[i] ? 0.0 : 1.0;
    ret[i] = rewards[i] + gamma * nonterm * ((1.0 - lam) * next_value + lam * next_ret);
    next_value = values[i];
    next_ret = ret[i];
  }
  return ret;
}

std::vector<double> GaeAdvantages(std::span<const double> rewards,
                                  std::span<const double> values, double bootstrap,
                                  std::span<const bool> dones, double gamma, double lam) {
  const std::size_t l = rewards.size();
  CheckLengths(l, {values.size(), dones.size()});
  std::vector<double> adv(l);
  double next_value = bootstrap;
  double next_adv = 0.0;
  for (std::size_t i = l; i-- > 0;) {
    double nonterm = dones[i] ? 0.0 : 1.0;
    double delta = rewards[i] + gamma * nonterm * next_value - values[i];
    adv[i] = delta + gamma * lam * nonterm * next_adv;
    next_value = values[i];
    next_adv = adv[i];
  }
  return adv;
}

VtraceResult VtraceTargets(std::span<const double> behavior_logps,
                           std::span<const double> target_logps,
                           std::span<const double> rewards,
                           std::span<const double> values, double bootstrap,
                           std::span<const bool> dones, double gamma, double rho_bar,
                           double c_bar) {
  const std::size_t l = rewards.size();
  CheckLengths(l, {behavior_logps.size(), target_logps.size(), values.size(), dones.size()});
  std::vector<double> rho(l), c(l);
  for (std::size_t i = 0; i < l; ++i) {
    if (!std::isfinite(behavior_logps[i]) || !std::isfinite(target_logps[i]))
      throw std::invalid_argument("non-finite log probability");
    double w = std::exp(target_logps[i] - behavior_logps[i]);
    rho[i] = std::min(rho_bar, w);
    c[i] = std::min(c_bar, w);
  }
  VtraceResult out;
  out.vs.assign(l, 0.0);
  out.pg_adv.assign(l, 0.0);
  double next_vs = bootstrap;
  double next_value = bootstrap;
  for (std::size_t i = l; i-- > 0;) {
    double nonterm = dones[i] ? 0.0 : 1.0;
    double delta = rho[i] * (rewards[i] + gamma * nonterm * next_value - values[i]);
    out.vs[i] = values[i] + delta + gamma * nonterm * c[i] * (next_vs - next_value);
    next_vs = out.vs[i];
    next_value = values[i];
  }
  for (std::size_t i = 0; i < l; ++i) {
    double nonterm = dones[i] ? 0.0 : 1.0;
    double vs_next = (i + 1 < l) ? out.vs[i + 1] : bootstrap;
    out.pg_adv[i] = rho[i] * (rewards[i] + gamma * nonterm * vs_next - values[i]);
  }
  return out;
}

LossResult PpoLossAndGrad(const ParamBlob& params, const ParamBlob* teacher,
                          const Minibatch& batch, const HyperParams& hp) {
  if (batch.samples.empty()) throw std::invalid_argument("empty minibatch");
  if (hp.kl_teacher_coef > 0.0 && teacher == nullptr)
    throw std::invalid_argument("teacher params required when kl_teacher_coef > 0");
  const std::size_t n = batch.samples.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> adv = EffectiveAdvantages(batch, hp.adv_norm);

  LossResult out;
  out.grad.assign(params.values.size(), 0.0);
  double clip_count = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = batch.samples[i];
    policy::ActionDistribution dist = policy::Distribution(params, s.obs);
    const std::size_t na = dist.probs.size();
    if (s.action >= na) throw std::invalid_argument("action out of range");
    double logp = std::log(dist.probs[s.action]);
    double ratio = std::exp(logp - s.behavior_logp);
    double clipped = std::clamp(ratio, 1.0 - hp.clip_eps, 1.0 + hp.clip_eps);
    double t1 = ratio * adv[i];
    double t2 = clipped * adv[i];
    double surr = std::min(t1, t2);

    double value = policy::ValueEstimate(params, s.obs);
    double verr = value - s.value_target;
    double h = Entropy(dist.probs);

    double kl = 0.0;
    std::vector<double> teacher_logp;
    if (teacher) {
      policy::ActionDistribution tq = policy::Distribution(*teacher, s.obs);
      teacher_logp.resize(na);
      for (std::size_t k = 0; k < na; ++k) {
        teacher_logp[k] = std::log(std::max(tq.probs[k], 1e-300));
        if (dist.probs[k] > 0.0)
          kl += dist.probs[k] * (std::log(dist.probs[k]) - teacher_logp[k]);
      }
    }

    out.loss += inv_n * (-surr + hp.vf_coef * verr * verr - hp.ent_coef * h +
                         hp.kl_teacher_coef * kl);
    out.stats.mean_ratio += inv_n * ratio;
    out.stats.entropy += inv_n * h;
    out.stats.value_loss += inv_n * verr * verr;
    if (t2 < t1) clip_count += 1.0;

    std::vector<double> dlogits(na, 0.0);
    // surrogate: gradient only when the unclipped term is active
    if (t1 <= t2) {
      for (std::size_t k = 0; k < na; ++k) {
        double ind = (k == s.action) ? 1.0 : 0.0;
        dlogits[k] += -adv[i] * ratio * (ind - dist.probs[k]) * inv_n;
      }
    }
    for (std::size_t k = 0; k < na; ++k) {
      double p = dist.probs[k];
      double logpk = p > 0.0 ? std::log(p) : 0.0;
      // entropy bonus: d(-ent*H)/dz_k = ent * p_k * (log p_k + H)
      dlogits[k] += hp.ent_coef * p * (logpk + h) * inv_n;
      if (teacher)
        dlogits[k] += hp.kl_teacher_coef * p * (logpk - teacher_logp[k] - kl) * inv_n;
    }
    double dvalue = 2.0 * hp.vf_coef * verr * inv_n;
    policy::AccumulateGrad(params, s.obs, dlogits, dvalue, out.grad);
  }
  out.stats.clip_fraction = clip_count * inv_n;
  return out;
}

LossResult PgLossAndGrad(const ParamBlob& params, const Minibatch& batch,
                         const HyperParams& hp) {
  if (batch.samples.empty()) throw std::invalid_argument("empty minibatch");
  const std::size_t n = batch.samples.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> adv = EffectiveAdvantages(batch, hp.adv_norm);

  LossResult out;
  out.grad.assign(params.values.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = batch.samples[i];
    policy::ActionDistribution dist = policy::Distribution(params, s.obs);
    const std::size_t na = dist.probs.size();
    if (s.action >= na) throw std::invalid_argument("action out of range");
    double logp = std::log(dist.probs[s.action]);
    double value = policy::ValueEstimate(params, s.obs);
    double verr = value - s.value_target;
    double h = Entropy(dist.probs);

    out.loss += inv_n * (-adv[i] * logp + hp.vf_coef * verr * verr - hp.ent_coef * h);
    out.stats.entropy += inv_n * h;
    out.stats.value_loss += inv_n * verr * verr;
    out.stats.mean_ratio += inv_n * std::exp(logp - s.behavior_logp);

    std::vector<double> dlogits(na, 0.0);
    for (std::size_t k = 0; k < na; ++k) {
      double ind = (k == s.action) ? 1.0 : 0.0;
      double p = dist.probs[k];
      double logpk = p > 0.0 ? std::log(p) : 0.0;
      dlogits[k] += (-adv[i] * (ind - p) + hp.ent_coef * p * (logpk + h)) * inv_n;
    }
    double dvalue = 2.0 * hp.vf_coef * verr * inv_n;
    policy::AccumulateGrad(params, s.obs, dlogits, dvalue, out.grad);
  }
  return out;
}

ParamBlob SgdStep(const ParamBlob& params, std::span<const double> grad,
                  double learning_rate) {
  if (grad.size() != params.values.size())
    throw std::invalid_argument("gradient length mismatch");
  ParamBlob next = params;
  for (std::size_t i = 0; i < grad.size(); ++i)
    next.values[i] -= learning_rate * grad[i];
  return next;
}

}  // namespace tleague::rlmath
