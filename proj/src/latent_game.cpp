#include "mgrl/latent_game.hpp"

#include <stdexcept>
#include <string>

namespace mgrl {

namespace {

void checkRows(const Matrix& m, Scalar maxMass, const std::string& what) {
  for (int r = 0; r < m.rows(); ++r) {
    if ((m.row(r).array() < -tol::kSimplexTol).any()) {
      throw std::runtime_error(what + ": negative entry in row " + std::to_string(r));
    }
    const Scalar mass = m.row(r).sum();
    if (mass > maxMass + tol::kSimplexTol) {
      throw std::runtime_error(what + ": row " + std::to_string(r) + " mass " +
                               std::to_string(mass) + " exceeds bound");
    }
  }
}

void checkExactRows(const Matrix& m, const std::string& what) {
  checkRows(m, 1.0, what);
  for (int r = 0; r < m.rows(); ++r) {
    if (std::abs(m.row(r).sum() - 1.0) > tol::kSimplexTol) {
      throw std::runtime_error(what + ": row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

}  // namespace

void LatentGame::validate() const {
  if (horizon <= 0 || latentCount <= 0 || players() <= 0) {
    throw std::runtime_error("LatentGame: sizes must be positive");
  }
  const int A = jointActions();
  if (static_cast<int>(trans.size()) != horizon) throw std::runtime_error("LatentGame: bad trans size");
  if (static_cast<int>(rewards.size()) != horizon) throw std::runtime_error("LatentGame: bad rewards size");
  if (init.size() != latentCount) throw std::runtime_error("LatentGame: bad init size");
  if (std::abs(init.sum() - 1.0) > tol::kSimplexTol || (init.array() < -tol::kSimplexTol).any()) {
    throw std::runtime_error("LatentGame: init is not a distribution");
  }
  for (int h = 0; h < horizon; ++h) {
    if (trans[h].rows() != latentCount * A || trans[h].cols() != latentCount) {
      throw std::runtime_error("LatentGame: transition shape mismatch at step " + std::to_string(h));
    }
    checkExactRows(trans[h], "LatentGame transitions[" + std::to_string(h) + "]");
    if (static_cast<int>(rewards[h].size()) != players()) {
      throw std::runtime_error("LatentGame: rewards player count mismatch");
    }
    for (int i = 0; i < players(); ++i) {
      const Matrix& r = rewards[h][i];
      if (r.rows() != latentCount || r.cols() != A) {
        throw std::runtime_error("LatentGame: reward shape mismatch");
      }
      if ((r.array().abs() > 1.0 + tol::kSimplexTol).any()) {
        throw std::runtime_error("LatentGame: reward magnitude exceeds 1");
      }
    }
  }
}

void FiniteHorizonModel::validate() const {
  const int A = jointActions();
  if (static_cast<int>(stateCount.size()) != horizon + 1) {
    throw std::runtime_error("FiniteHorizonModel: stateCount must have H+1 entries");
  }
  if (init.size() != stateCount[0]) throw std::runtime_error("FiniteHorizonModel: bad init size");
  for (int h = 0; h < horizon; ++h) {
    if (trans[h].rows() != stateCount[h] * A || trans[h].cols() != stateCount[h + 1]) {
      throw std::runtime_error("FiniteHorizonModel: transition shape mismatch at step " +
                               std::to_string(h));
    }
    checkRows(trans[h], 1.0, "FiniteHorizonModel transitions[" + std::to_string(h) + "]");
    for (int i = 0; i < players(); ++i) {
      if (rewards[h][i].rows() != stateCount[h] || rewards[h][i].cols() != A) {
        throw std::runtime_error("FiniteHorizonModel: reward shape mismatch");
      }
    }
  }
}

FiniteHorizonModel FiniteHorizonModel::fromLatentGame(const LatentGame& game) {
  FiniteHorizonModel m;
  m.horizon = game.horizon;
  m.actions = game.actions;
  m.stateCount.assign(game.horizon + 1, game.latentCount);
  m.trans = game.trans;
  m.rewards = game.rewards;
  m.init = game.init;
  return m;
}

PolicyTable PolicyTable::uniform(const FiniteHorizonModel& model) {
  PolicyTable pt;
  const int A = model.jointActions();
  pt.table.resize(model.horizon);
  for (int h = 0; h < model.horizon; ++h) {
    pt.table[h] = Matrix::Constant(model.stateCount[h], A, 1.0 / A);
  }
  return pt;
}

Vector PolicyTable::playerMarginal(const Vector& joint, const ActionSpace& actions, int player) {
  Vector marg = Vector::Zero(actions.sizes[player]);
  for (int a = 0; a < joint.size(); ++a) {
    marg[actions.playerAction(a, player)] += joint[a];
  }
  return marg;
}

}  // namespace mgrl
