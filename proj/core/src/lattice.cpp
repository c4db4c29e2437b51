#include "qcawalk/lattice.hpp"

#include <algorithm>

#include "qcawalk/errors.hpp"

namespace qcaw {

namespace {

void check_side(int n, const char* what) {
  if (n < 4) throw DomainError(std::string(what) + " side must be >= 4, got " + std::to_string(n));
  if (n % 2 != 0) {
    throw DomainError(std::string(what) + " side must be even (perfect matching), got " +
                      std::to_string(n));
  }
}

}  // namespace

Lattice Lattice::cycle(int n) {
  check_side(n, "cycle");
  return Lattice(Kind::cycle, n);
}

Lattice Lattice::torus(int n) {
  check_side(n, "torus");
  return Lattice(Kind::torus, n);
}

int Lattice::vertex_id(int i, int j) const {
  if (kind_ == Kind::cycle) {
    if (j != 0 || i < 0 || i >= n_) throw DomainError("cycle coordinate out of range");
    return i;
  }
  if (i < 0 || i >= n_ || j < 0 || j >= n_) throw DomainError("torus coordinate out of range");
  return i + n_ * j;
}

std::pair<int, int> Lattice::coords(int vertex) const {
  if (!contains(vertex)) throw DomainError("vertex " + std::to_string(vertex) + " out of range");
  if (kind_ == Kind::cycle) return {vertex, 0};
  return {vertex % n_, vertex / n_};
}

bool Lattice::are_neighbors(int a, int b) const {
  if (!contains(a) || !contains(b) || a == b) return false;
  const auto [ai, aj] = coords(a);
  const auto [bi, bj] = coords(b);
  auto ring_adjacent = [this](int x, int y) { return (x + 1) % n_ == y || (y + 1) % n_ == x; };
  if (kind_ == Kind::cycle) return ring_adjacent(ai, bi);
  return (aj == bj && ring_adjacent(ai, bi)) || (ai == bi && ring_adjacent(aj, bj));
}

int Lattice::next_along_x(int vertex) const {
  const auto [i, j] = coords(vertex);
  return kind_ == Kind::cycle ? (i + 1) % n_ : vertex_id((i + 1) % n_, j);
}

std::vector<VertexPair> Lattice::edges() const {
  std::vector<VertexPair> out;
  auto add = [&out](int a, int b) { out.emplace_back(std::min(a, b), std::max(a, b)); };
  if (kind_ == Kind::cycle) {
    for (int i = 0; i < n_; ++i) add(i, (i + 1) % n_);
  } else {
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        add(vertex_id(i, j), vertex_id((i + 1) % n_, j));
        add(vertex_id(i, j), vertex_id(i, (j + 1) % n_));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Lattice::name() const {
  if (kind_ == Kind::cycle) return std::to_string(n_) + "-cycle";
  return std::to_string(n_) + "x" + std::to_string(n_) + "-torus";
}

std::vector<Tessellation> build_cycle_tessellations(int n) {
  check_side(n, "cycle");
  Tessellation t0{"T0", {}};
  Tessellation t1{"T1", {}};
  for (int i = 0; i < n / 2; ++i) {
    t0.pairs.emplace_back(2 * i, 2 * i + 1);
    t1.pairs.emplace_back(2 * i + 1, (2 * i + 2) % n);
  }
  return {t0, t1};
}

std::vector<Tessellation> build_torus_tessellations(int n) {
  check_side(n, "torus");
  const auto id = [n](int i, int j) { return i + n * j; };
  Tessellation t00{"T00", {}};
  Tessellation t01{"T01", {}};
  Tessellation t10{"T10", {}};
  Tessellation t11{"T11", {}};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n / 2; ++i) {
      t00.pairs.emplace_back(id(2 * i, j), id(2 * i + 1, j));
      t10.pairs.emplace_back(id(2 * i + 1, j), id((2 * i + 2) % n, j));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n / 2; ++j) {
      t01.pairs.emplace_back(id(i, 2 * j), id(i, 2 * j + 1));
      t11.pairs.emplace_back(id(i, 2 * j + 1), id(i, (2 * j + 2) % n));
    }
  }
  return {t00, t01, t10, t11};
}

std::vector<Tessellation> build_tessellations(const Lattice& lattice) {
  return lattice.kind() == Lattice::Kind::cycle ? build_cycle_tessellations(lattice.side())
                                                : build_torus_tessellations(lattice.side());
}

}  // namespace qcaw
