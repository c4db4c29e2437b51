#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qcaw {

/// Unordered lattice edge, stored as the (first, second) pair in gate order.
using VertexPair = std::pair<int, int>;

/// N-cycle or N x N torus with periodic boundaries. Torus vertex (i, j) has id
/// i + N*j (i along x, j along y).
class Lattice {
 public:
  enum class Kind { cycle, torus };

  static Lattice cycle(int n);
  static Lattice torus(int n);

  Kind kind() const noexcept { return kind_; }
  int side() const noexcept { return n_; }
  int vertex_count() const noexcept { return kind_ == Kind::cycle ? n_ : n_ * n_; }

  /// Vertex id of torus coordinate (i, j); cycles accept j == 0 only.
  int vertex_id(int i, int j = 0) const;
  std::pair<int, int> coords(int vertex) const;
  bool contains(int vertex) const noexcept { return vertex >= 0 && vertex < vertex_count(); }
  bool are_neighbors(int a, int b) const;

  /// Right-hand neighbour: v+1 mod N on the cycle, ((i+1) mod N, j) on the torus.
  int next_along_x(int vertex) const;

  /// Every edge exactly once, each as (min, max).
  std::vector<VertexPair> edges() const;

  std::string name() const;

 private:
  Lattice(Kind kind, int n) : kind_(kind), n_(n) {}

  Kind kind_;
  int n_;
};

struct Tessellation {
  std::string label;  // T0/T1 or T00/T01/T10/T11
  std::vector<VertexPair> pairs;
};

/// T0 = {(2i, 2i+1)}, T1 = {(2i+1, 2i+2 mod N)}. N even, N >= 4.
std::vector<Tessellation> build_cycle_tessellations(int n);

/// T00 horizontal even, T01 vertical even, T10 horizontal odd (wrapping),
/// T11 vertical odd (wrapping), in application order. N even, N >= 4.
std::vector<Tessellation> build_torus_tessellations(int n);

std::vector<Tessellation> build_tessellations(const Lattice& lattice);

}  // namespace qcaw
