#include "tleague/league/payoff.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tleague::league {

std::pair<double, double> EloUpdate(double elo_i, double elo_j, double score_i,
                                    double k_factor) {
  double expected = 1.0 / (1.0 + std::pow(10.0, (elo_j - elo_i) / 400.0));
  double delta = k_factor * (score_i - expected);
  return {elo_i + delta, elo_j - delta};
}

void PayoffMatrix::AddModel(const std::string& key, double initial_elo) {
  if (index_.count(key)) return;
  index_[key] = keys_.size();
  keys_.push_back(key);
  for (auto& row : wins_) row.push_back(0);
  for (auto& row : losses_) row.push_back(0);
  for (auto& row : ties_) row.push_back(0);
  wins_.emplace_back(keys_.size(), 0);
  losses_.emplace_back(keys_.size(), 0);
  ties_.emplace_back(keys_.size(), 0);
  elo_.push_back(initial_elo);
}

bool PayoffMatrix::Contains(const std::string& key) const {
  return index_.count(key) > 0;
}

std::size_t PayoffMatrix::Index(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw std::invalid_argument("unknown model key: " + key);
  return it->second;
}

void PayoffMatrix::Record(const std::string& learning_key,
                          const std::string& opponent_key, Outcome learning_outcome,
                          double elo_k) {
  std::size_t i = Index(learning_key);
  std::size_t j = Index(opponent_key);
  double score = 0.5;
  switch (learning_outcome) {
    case Outcome::kWin:
      ++wins_[i][j];
      score = 1.0;
      break;
    case Outcome::kLoss:
      ++losses_[i][j];
      score = 0.0;
      break;
    case Outcome::kTie:
      ++ties_[i][j];
      score = 0.5;
      break;
  }
  if (i != j) {
    auto [ei, ej] = EloUpdate(elo_[i], elo_[j], score, elo_k);
    elo_[i] = ei;
    elo_[j] = ej;
  }
}

double PayoffMatrix::SmoothedWinRate(const std::string& learning_key,
                                     const std::string& opponent_key) const {
  std::size_t i = Index(learning_key);
  std::size_t j = Index(opponent_key);
  double w = static_cast<double>(wins_[i][j]);
  double l = static_cast<double>(losses_[i][j]);
  double t = static_cast<double>(ties_[i][j]);
  return (w + t / 2.0 + 1.0) / (w + l + t + 2.0);
}

double PayoffMatrix::Elo(const std::string& key) const { return elo_[Index(key)]; }

double PayoffMatrix::EloSum() const {
  double s = 0.0;
  for (double e : elo_) s += e;
  return s;
}

std::uint64_t PayoffMatrix::Wins(const std::string& i, const std::string& j) const {
  return wins_[Index(i)][Index(j)];
}

std::uint64_t PayoffMatrix::Losses(const std::string& i, const std::string& j) const {
  return losses_[Index(i)][Index(j)];
}

std::uint64_t PayoffMatrix::Ties(const std::string& i, const std::string& j) const {
  return ties_[Index(i)][Index(j)];
}

std::string PayoffMatrix::Summary() const {
  std::ostringstream os;
  os << "payoff matrix (" << keys_.size() << " models), cells w/l/t\n";
  std::size_t width = 12;
  for (const auto& k : keys_) width = std::max(width, k.size() + 2);
  os << std::setw(static_cast<int>(width)) << "";
  for (const auto& k : keys_) os << std::setw(static_cast<int>(width)) << k;
  os << '\n';
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    os << std::setw(static_cast<int>(width)) << keys_[i];
    for (std::size_t j = 0; j < keys_.size(); ++j) {
      std::ostringstream cell;
      cell << wins_[i][j] << '/' << losses_[i][j] << '/' << ties_[i][j];
      os << std::setw(static_cast<int>(width)) << cell.str();
    }
    os << '\n';
  }
  os << "elo ratings\n";
  for (std::size_t i = 0; i < keys_.size(); ++i)
    os << "  " << keys_[i] << " " << std::fixed << std::setprecision(1) << elo_[i]
       << '\n';
  return os.str();
}

}  // namespace tleague::league
