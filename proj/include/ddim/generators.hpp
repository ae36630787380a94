#pragma once

#include "ddim/pointset.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ddim {

/// natural: the construction's own coordinates. separated: scaled so the
/// minimum separation is 1 (exactly, up to rounding, for the documented
/// factor of each generator).
enum class Frame { natural, separated };

Frame parse_frame(const std::string& s);
const char* to_string(Frame f);

/// All integer points of [0, q]^d; (q+1)^d points.
PointSet gen_lattice(int d, int q);

/// One point per unit cell m + [0,1]^d of [0,q]^d, placed at the cell center
/// plus jitter * (uniform point of the unit ball). Separation is at least
/// 1 - 2*jitter; the separated frame scales by 1 / (1 - 2*jitter).
/// jitter in [0, 0.4].
PointSet gen_delone(int d, int q, double jitter, std::uint64_t seed, Frame frame = Frame::separated);

/// {1/i : i <= M}^2, row order (i, j) with j fastest. The separated frame
/// scales by M^2, giving minimum separation M/(M-1).
PointSet gen_reciprocal_grid(int m, Frame frame = Frame::natural);

struct TailShape {
  int m = 0;
  /// floor(M^(1 - eps/4)) indices per axis
  int k = 0;
  /// first index M - K + 1
  int first = 0;
  /// whether M - M^(1 - eps/4) > M/2
  bool large_m = false;
};
/// Requires M >= 3, eps in (0, 4), and 2 <= K <= M.
TailShape reciprocal_tail_shape(int m, double eps);

/// {1/n : M-K+1 <= n <= M}^2 with K = floor(M^(1 - eps/4)). The separated
/// frame scales by M^2 as for the full grid.
PointSet gen_reciprocal_tail(int m, double eps, Frame frame = Frame::natural);

/// {n^(-1/a) : n <= M} on the line; the separated frame divides by the
/// smallest gap (M-1)^(-1/a) - M^(-1/a).
PointSet gen_reciprocal_sequence(double a, int m, Frame frame = Frame::natural);

enum class CantorKind { fixed, vanishing };

/// Product Cantor construction in [0,1]^2 with one point at the center of each
/// generation-M square. paths[i] holds 2 bits per generation (generation g at
/// bits 2(g-1)); the quadrant code is 0 lower-left, 1 lower-right, 2 upper-left,
/// 3 upper-right.
struct CantorSet {
  PointSet points;
  CantorKind kind = CantorKind::fixed;
  double lambda = 0.0;
  int generations = 0;
  std::vector<std::uint64_t> paths;
  /// side length per generation 0..M, natural frame
  std::vector<double> sides;
  /// natural-frame minimum separation of the full generation-M set
  double separation = 0.0;
  Frame frame = Frame::natural;
};

/// Side lengths lambda^k.
CantorSet gen_cantor_fixed(double lambda, int m, Frame frame = Frame::natural);
/// Side lengths lambda^k / 2^(k(k-1)/2).
CantorSet gen_cantor_vanishing(double lambda, int m, Frame frame = Frame::natural);

/// Largest diameter/separation ratio accepted by the Cantor generators: beyond
/// it the sibling offsets fall below ~1e-4 of the coordinate rounding step.
inline constexpr double kMaxCantorAspect = 1e-4 * 4503599627370496.0;

enum class PruneMode { p, p_prime };

/// Keeps, inside every generation-(g-1) square, only one generation-g child
/// and its descendants. Mode p acts on generation g = k, mode p_prime on
/// generation g = M - k + 1. The survivor is `preferred` when present in the
/// group, otherwise the lowest present quadrant. k in [1, M].
CantorSet cantor_prune(const CantorSet& a, int k, PruneMode mode, int preferred = 0);

/// Generator id plus parameters, as stored in family manifests.
struct GeneratorSpec {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
};

/// Builds a family from a spec. Recognized ids and parameters:
///   lattice              d, q: [..]
///   delone               d, q: [..], jitter, seed, frame
///   reciprocal_grid      M: [..], frame
///   reciprocal_tail      M: [..], eps, frame
///   reciprocal_sequence  a, M: [..], frame
///   cantor_fixed         lambda, M: [..], frame
///   cantor_vanishing     lambda, M: [..], frame
/// The returned family's params echo the requested ones with defaults filled in.
SetFamily generate_family(const GeneratorSpec& spec);

std::vector<std::string> generator_ids();

}  // namespace ddim
