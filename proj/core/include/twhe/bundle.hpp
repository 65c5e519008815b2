#pragma once

#include <functional>
#include <string>
#include <vector>

#include "twhe/twist.hpp"
#include "twhe/validation.hpp"

namespace twhe {

// A holomorphic alpha-twisted bundle: transition functions phi_ij with
// v_j = phi_ij v_i on U_ij and phi_ki phi_jk phi_ij = alpha_ijk Id.
class TwistedBundle {
 public:
  using TransitionFn = std::function<CMat(int from, int to, std::size_t idx)>;
  using ChartMetricFn = std::function<CMat(int chart, std::size_t idx)>;

  // One summand of a direct sum: rows [offset, offset + rank).
  struct Block {
    int offset;
    int rank;
    std::string id;
  };

  TwistedBundle(int rank, TwistPtr twist, TransitionFn fn, std::string id);

  int rank() const { return rank_; }
  const TwistPtr& twist() const { return twist_; }
  const CoverPtr& cover() const { return twist_->cover; }
  const GridPtr& grid() const { return twist_->cover->grid(); }
  const std::string& id() const { return id_; }

  // phi_{from -> to} at a point of U_from cap U_to. Identity when from == to.
  CMat transition(int from, int to, std::size_t idx) const;

  // A compatible metric with closed form, when the builder knows one
  // (flat for clock-shift/trivial, e^{-2 pi d y^2} for theta). Empty otherwise.
  const ChartMetricFn& reference_metric() const { return reference_; }
  void set_reference_metric(ChartMetricFn f) { reference_ = std::move(f); }

  const std::vector<Block>& blocks() const { return blocks_; }
  void set_blocks(std::vector<Block> b) { blocks_ = std::move(b); }

  // Copy with phi_ij multiplied by factor(idx) and phi_ji by its inverse on
  // U_ij. Used to inject faults.
  TwistedBundle with_modified_transition(int i, int j, std::function<cd(std::size_t)> factor) const;

 private:
  int rank_;
  TwistPtr twist_;
  TransitionFn fn_;
  std::string id_;
  ChartMetricFn reference_;
  std::vector<Block> blocks_;
};

// Bundle builders. Covers: trivial bundles accept any cover; clock_shift
// needs a cover banded along x1 and y1 with the matching twist; theta needs
// the cover to band y1 (and y2 for d2 != 0) and the trivial twist.
TwistedBundle build_trivial_bundle(TwistPtr twist, int rank);
TwistedBundle build_clock_shift_bundle(TwistPtr twist, int r);
// Line bundle of degree d1 along z1 (and d2 along z2 when n = 2).
TwistedBundle build_theta_bundle(TwistPtr twist, int d1, int d2 = 0);
// Direct sum. All summands must share the twist.
TwistedBundle direct_sum(const std::vector<TwistedBundle>& parts);

// Checks:
//   "identity"    phi_ii - Id
//   "inverse"     phi_ij phi_ji - Id
//   "cocycle"     phi_ki phi_jk phi_ij - alpha_ijk Id
//   "holomorphic" sup |phi_ij^{-1} dbar phi_ij| (finite differences inside U_ij)
ValidationReport validate_bundle(const TwistedBundle& E);

}  // namespace twhe
