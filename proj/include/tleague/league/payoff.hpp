#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::league {

// Standard logistic Elo update; returns the new (rating_i, rating_j).
// score_i: 1 win, 0.5 tie, 0 loss for side i. Total rating is conserved.
std::pair<double, double> EloUpdate(double elo_i, double elo_j, double score_i,
                                    double k_factor);

// Win/loss/tie bookkeeping for ordered model pairs (row = learning side)
// plus Elo ratings. Single-writer; the league manager serializes access.
class PayoffMatrix {
 public:
  // Registers a model with rating `initial_elo`; idempotent.
  void AddModel(const std::string& key, double initial_elo = 0.0);

  bool Contains(const std::string& key) const;

  // Records one game outcome seen from the learning side and applies the
  // Elo update (skipped when both keys are the same model).
  void Record(const std::string& learning_key, const std::string& opponent_key,
              Outcome learning_outcome, double elo_k);

  // Smoothed win rate p_hat = (wins + ties/2 + 1) / (wins + losses + ties + 2),
  // always in (0, 1).
  double SmoothedWinRate(const std::string& learning_key,
                         const std::string& opponent_key) const;

  double Elo(const std::string& key) const;
  double EloSum() const;

  std::uint64_t Wins(const std::string& i, const std::string& j) const;
  std::uint64_t Losses(const std::string& i, const std::string& j) const;
  std::uint64_t Ties(const std::string& i, const std::string& j) const;

  const std::vector<std::string>& keys() const { return keys_; }

  // Aligned text dump of counts, win rates and Elo ratings.
  std::string Summary() const;

 private:
  std::size_t Index(const std::string& key) const;

  std::vector<std::string> keys_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::uint64_t>> wins_, losses_, ties_;
  std::vector<double> elo_;
};

}  // namespace tleague::league
