#pragma once

#include <string>
#include <variant>
#include <vector>

#include "coarselab/covers.hpp"
#include "coarselab/geodesics.hpp"
#include "coarselab/presentation.hpp"
#include "coarselab/vankampen.hpp"

namespace coarse {

/// Desk-scale stand-ins for the proof constants. The exact values are
/// astronomically infeasible; runs use these and record the gap.
struct DeskOverrides {
  long long d_used = 16;
  long long N_used = 24;
  long long R_used = 64;
};

/// The proof's constants, computed exactly, next to the desk values a run
/// actually uses. N is a decimal string: max{100·D^100, 300M} overflows
/// machine words for every D >= 2.
struct PaperConstants {
  long long M = 0;            // longest relator
  long long d_threshold = 0;  // 100M + 100; the proof fixes d above this
  long long D = 0;            // claimed diameter bound of the cover
  std::string N;              // max{100·D^100, 300M}, exact decimal digits
  bool N_fits_ball_budget = false;  // N <= budget.max_vertices (D >= 2: never)
  long long d_used = 16;
  long long N_used = 24;
  long long R_used = 64;
  /// One line per desk value that violates a bound the proof relies on.
  std::vector<std::string> overrides;
};

PaperConstants paper_constants(const Presentation& P, long long D,
                               const DeskOverrides& desk = {},
                               const BallBudget& budget = {});

enum class WitnessKind {
  MultiplicityBall,   // some B(x,d) meets >= 3 pieces
  ProximityPair,      // two same-class pieces closer than d
  TriplePoint,        // a vertex in three distinct pieces at once
  SinglePieceForced,  // one piece swallows the ball, so diam >= R
};

struct MultiplicityBallPayload {
  std::size_t center = 0;            // ball vertex whose d-ball meets them all
  std::vector<std::size_t> pieces;   // >= 3 distinct piece ids
};

struct ProximityPairPayload {
  std::size_t piece_a = 0, piece_b = 0;    // distinct, same class
  std::size_t vertex_a = 0, vertex_b = 0;  // members realizing the distance
  long long distance = 0;                  // exact, < d
};

struct TriplePointPayload {
  std::size_t vertex = 0;           // ball index of the common point
  Elem element;                     // its canonical key
  std::vector<std::size_t> pieces;  // 3 distinct piece ids containing it
};

struct SinglePiecePayload {
  std::size_t piece = 0;
  long long diameter = 0;  // exact; >= ball radius
};

/// A concrete violation of the claimed low-dimensional cover, together with
/// the ordered record of proof steps that produced it. Payloads carry raw
/// vertices and piece ids so they re-verify without trusting the pipeline.
struct RefutationWitness {
  WitnessKind kind = WitnessKind::ProximityPair;
  int d = 0;  // scale the violation is claimed at
  std::variant<MultiplicityBallPayload, ProximityPairPayload,
               TriplePointPayload, SinglePiecePayload>
      payload;
  std::vector<std::string> trace;
};

/// Recompute the witness's distances and memberships from the cover's raw
/// data; true only when every claim checks out.
bool verify_witness(const Cover& C, const RefutationWitness& W);

/// Dimension-zero refutation: a single-class cover of a connected ball with
/// d >= 2 either has two pieces within distance 1 (ProximityPair) or one
/// piece of diameter >= R (SinglePieceForced). Requires a single class and
/// d >= 2 (InvalidParameter).
RefutationWitness zero_dim_refute(const Ball& B, const Cover& partition, int d);

/// The loop the proof tests a cover against: a geodesic segment [x,y]
/// through x0 closed up by a path avoiding B(x0, N_used).
struct TestLoop {
  BiInfiniteWitness witness;  // identity-centered segment, length 2n
  std::size_t x0 = 0;         // ball index the witness is translated to
  std::size_t x = 0, y = 0;   // ball indices of the segment endpoints
  std::vector<std::size_t> segment;  // 2n+1 ball indices along [x,y]
  PathInBall avoiding;               // p: x -> y, misses B(x0, N_used)
  Word word;                  // closed loop w = [x,y] then p reversed
  std::size_t geodesic_prefix = 0;  // first this-many letters spell [x,y]
  int n = 0;
  int N_used = 0;
  std::vector<std::string> trace;
};

/// Build the test loop at x0 with half-length n > N_used. Callers should
/// hold a one-ended verdict for this window; a separating ball surfaces as
/// NoAvoidingPath, an undersized window as BudgetExceeded.
TestLoop build_test_loop(const GroupModel& M, const Ball& B, std::size_t x0,
                         int n, int N_used, const SearchBudget& budget = {});

struct RefuteParams {
  int d_used = 16;
  int N_used = 24;
  int n = 32;                  // test-loop half-length, > N_used
  DecompositionBounds diagram;  // filling budget for the loop
  SearchBudget geodesic;        // witness search budget
};

/// A proof step whose hypothesis failed at desk parameters; step names the
/// first failure, trace holds everything executed up to it.
struct Inconclusive {
  std::string step;
  std::string diagnostics;
  std::vector<std::string> trace;
};

using RefutationOutcome = std::variant<RefutationWitness, Inconclusive>;

/// Run the refutation pipeline against a cover claiming multiplicity <= 2
/// at scale d: multiplicity scan, same-class proximity scan, relator
/// containment, test loop, diagram filling, and the pulled-back frontier
/// argument yielding a TriplePoint. Witness or Inconclusive, never Pass;
/// every witness is re-verified before it is returned.
RefutationOutcome find_violation(const Presentation& P, const GroupModel& M,
                                 const Ball& B, const Cover& C,
                                 const RefuteParams& params = {});

}  // namespace coarse
