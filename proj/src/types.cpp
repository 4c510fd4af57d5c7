#include "tleague/types.hpp"

#include <cmath>
#include <stdexcept>

namespace tleague {

const char* OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kWin: return "win";
    case Outcome::kLoss: return "loss";
    case Outcome::kTie: return "tie";
  }
  return "?";
}

void HyperParams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("hyperparams: ") + what);
  };
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be > 0");
  require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0, 1]");
  require(lam >= 0.0 && lam <= 1.0, "lam must be in [0, 1]");
  require(clip_eps > 0.0, "clip_eps must be > 0");
  require(vf_coef >= 0.0, "vf_coef must be >= 0");
  require(ent_coef >= 0.0, "ent_coef must be >= 0");
  require(kl_teacher_coef >= 0.0, "kl_teacher_coef must be >= 0");
  require(rho_bar > 0.0, "rho_bar must be > 0");
  require(c_bar > 0.0, "c_bar must be > 0");
  require(c_bar <= rho_bar, "c_bar must be <= rho_bar");
  require(elo_sigma > 0.0, "elo_sigma must be > 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(unroll_len >= 1, "unroll_len must be >= 1");
  require(max_reuse >= 1, "max_reuse must be >= 1");
}

}  // namespace tleague
