#include "eat/sfc.hpp"

#include <cmath>
#include <cstdlib>

namespace eat::sfc {

namespace {

bool power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

std::string grid_str(const Grid& g) {
  std::string s = std::to_string(g.height) + "x" + std::to_string(g.width);
  if (g.depth > 1) s += "x" + std::to_string(g.depth);
  return s;
}

// Classic Hilbert rotation step. Order-1 traversal under this convention is
// (0,0), (0,1), (1,1), (1,0).
void hilbert_rot(long long n, long long& x, long long& y, long long rx, long long ry) {
  if (ry == 0) {
    if (rx == 1) {
      x = n - 1 - x;
      y = n - 1 - y;
    }
    std::swap(x, y);
  }
}

long long hilbert_index(int side, int x, int y) {
  long long lx = x, ly = y, d = 0;
  for (long long s = side / 2; s > 0; s /= 2) {
    const long long rx = (lx & s) > 0 ? 1 : 0;
    const long long ry = (ly & s) > 0 ? 1 : 0;
    d += s * s * ((3 * rx) ^ ry);
    hilbert_rot(s, lx, ly, rx, ry);
  }
  return d;
}

std::pair<int, int> hilbert_point(int side, long long k) {
  long long x = 0, y = 0, t = k;
  for (long long s = 1; s < side; s *= 2) {
    const long long rx = 1 & (t / 2);
    const long long ry = 1 & (t ^ rx);
    hilbert_rot(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
  return {static_cast<int>(x), static_cast<int>(y)};
}

// Skilling's transpose algorithm, n dimensions of b bits each.
void axes_to_transpose(uint32_t* x, int b, int n) {
  uint32_t m = 1u << (b - 1), p, q, t;
  for (q = m; q > 1; q >>= 1) {
    p = q - 1;
    for (int i = 0; i < n; i++) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  for (int i = 1; i < n; i++) x[i] ^= x[i - 1];
  t = 0;
  for (q = m; q > 1; q >>= 1) {
    if (x[n - 1] & q) t ^= q - 1;
  }
  for (int i = 0; i < n; i++) x[i] ^= t;
}

void transpose_to_axes(uint32_t* x, int b, int n) {
  uint32_t nn = 2u << (b - 1), p, q, t;
  t = x[n - 1] >> 1;
  for (int i = n - 1; i > 0; i--) x[i] ^= x[i - 1];
  x[0] ^= t;
  for (q = 2; q != nn; q <<= 1) {
    p = q - 1;
    for (int i = n - 1; i >= 0; i--) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
}

// Pack the transpose form into a single index, x[0] carrying the most
// significant bit of each level.
long long transpose_to_index(const uint32_t* x, int b, int n) {
  long long h = 0;
  for (int q = b - 1; q >= 0; --q) {
    for (int i = 0; i < n; ++i) {
      h = (h << 1) | ((x[i] >> q) & 1);
    }
  }
  return h;
}

void index_to_transpose(long long h, uint32_t* x, int b, int n) {
  for (int i = 0; i < n; ++i) x[i] = 0;
  int bit = b * n - 1;
  for (int q = b - 1; q >= 0; --q) {
    for (int i = 0; i < n; ++i) {
      x[i] |= static_cast<uint32_t>((h >> bit) & 1) << q;
      --bit;
    }
  }
}

int log2_exact(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

}  // namespace

CurveKind CurveKind::parse(const std::string& text) {
  if (text == "sweep") return Sweep();
  if (text == "scan") return Scan();
  if (text == "zorder") return ZOrder();
  if (text == "hilbert") return Hilbert();
  if (text.rfind("sis:", 0) == 0) {
    const std::string arg = text.substr(4);
    char* end = nullptr;
    const long side = std::strtol(arg.c_str(), &end, 10);
    if (end == arg.c_str() || *end != '\0' || side < 1) {
      throw InvalidConfig("bad SweepInSweep side in curve name '" + text + "'");
    }
    return Sis(static_cast<int>(side));
  }
  throw InvalidConfig("unknown curve '" + text +
                      "' (expected sweep|scan|zorder|hilbert|sis:<s>)");
}

std::string CurveKind::name() const {
  switch (curve) {
    case Curve::sweep: return "sweep";
    case Curve::scan: return "scan";
    case Curve::zorder: return "zorder";
    case Curve::hilbert: return "hilbert";
    case Curve::sweep_in_sweep: return "sis:" + std::to_string(slice_side);
  }
  return "?";
}

void validate(CurveKind kind, const Grid& grid) {
  if (grid.height < 1 || grid.width < 1 || grid.depth < 1) {
    throw InvalidGrid("grid " + grid_str(grid) + " has empty extent");
  }
  switch (kind.curve) {
    case Curve::sweep:
    case Curve::scan:
      return;
    case Curve::zorder:
    case Curve::hilbert:
      if (grid.depth == 1) {
        if (grid.height != grid.width || !power_of_two(grid.width)) {
          throw InvalidGrid(kind.name() + " requires a square power-of-two grid, got " +
                            grid_str(grid));
        }
        return;
      }
      if (kind.curve != Curve::hilbert) {
        throw InvalidGrid("only hilbert is defined in 3D, got " + kind.name());
      }
      if (grid.height != grid.width || grid.width != grid.depth ||
          !power_of_two(grid.width)) {
        throw InvalidGrid("3D hilbert requires a cubic power-of-two grid, got " +
                          grid_str(grid));
      }
      return;
    case Curve::sweep_in_sweep: {
      const int s = kind.slice_side;
      if (s < 1) throw InvalidGrid("SweepInSweep side must be >= 1");
      if (grid.height % s != 0 || grid.width % s != 0) {
        throw InvalidGrid("SweepInSweep(" + std::to_string(s) +
                          ") needs the side to divide both grid extents, got " +
                          grid_str(grid));
      }
      return;
    }
  }
}

long long curve_index(CurveKind kind, const Grid& grid, int x, int y) {
  validate(kind, grid);
  if (x < 0 || x >= grid.width || y < 0 || y >= grid.height) {
    throw OutOfBounds("cell (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside grid " + grid_str(grid));
  }
  const long long w = grid.width;
  switch (kind.curve) {
    case Curve::sweep:
      return static_cast<long long>(y) * w + x;
    case Curve::scan:
      return static_cast<long long>(y) * w + ((y % 2 == 0) ? x : (w - 1 - x));
    case Curve::zorder: {
      long long k = 0;
      for (int b = 0; (1 << b) < grid.width; ++b) {
        k |= static_cast<long long>((x >> b) & 1) << (2 * b);
        k |= static_cast<long long>((y >> b) & 1) << (2 * b + 1);
      }
      return k;
    }
    case Curve::hilbert:
      return hilbert_index(grid.width, x, y);
    case Curve::sweep_in_sweep: {
      const long long s = kind.slice_side;
      const long long blocks_per_row = w / s;
      const long long block = (y / s) * blocks_per_row + (x / s);
      return block * s * s + (y % s) * s + (x % s);
    }
  }
  throw InvalidGrid("unreachable curve kind");
}

std::pair<int, int> curve_point(CurveKind kind, const Grid& grid, long long k) {
  validate(kind, grid);
  const long long n = static_cast<long long>(grid.height) * grid.width;
  if (k < 0 || k >= n) {
    throw OutOfBounds("index " + std::to_string(k) + " outside [0, " +
                      std::to_string(n) + ")");
  }
  const long long w = grid.width;
  switch (kind.curve) {
    case Curve::sweep:
      return {static_cast<int>(k % w), static_cast<int>(k / w)};
    case Curve::scan: {
      const long long y = k / w;
      const long long r = k % w;
      return {static_cast<int>((y % 2 == 0) ? r : (w - 1 - r)), static_cast<int>(y)};
    }
    case Curve::zorder: {
      int x = 0, y = 0;
      for (int b = 0; (1 << b) < grid.width; ++b) {
        x |= static_cast<int>((k >> (2 * b)) & 1) << b;
        y |= static_cast<int>((k >> (2 * b + 1)) & 1) << b;
      }
      return {x, y};
    }
    case Curve::hilbert:
      return hilbert_point(grid.width, k);
    case Curve::sweep_in_sweep: {
      const long long s = kind.slice_side;
      const long long blocks_per_row = w / s;
      const long long block = k / (s * s);
      const long long within = k % (s * s);
      const long long bx = (block % blocks_per_row) * s;
      const long long by = (block / blocks_per_row) * s;
      return {static_cast<int>(bx + within % s), static_cast<int>(by + within / s)};
    }
  }
  throw InvalidGrid("unreachable curve kind");
}

long long curve_index_3d(const Grid& grid, int x, int y, int z) {
  validate(CurveKind::Hilbert(), grid);
  if (grid.depth < 2) {
    throw InvalidGrid("curve_index_3d needs a 3D grid, got " + grid_str(grid));
  }
  if (x < 0 || x >= grid.width || y < 0 || y >= grid.height || z < 0 ||
      z >= grid.depth) {
    throw OutOfBounds("cell (" + std::to_string(x) + ", " + std::to_string(y) +
                      ", " + std::to_string(z) + ") outside grid " + grid_str(grid));
  }
  const int b = log2_exact(grid.width);
  uint32_t axes[3] = {static_cast<uint32_t>(x), static_cast<uint32_t>(y),
                      static_cast<uint32_t>(z)};
  axes_to_transpose(axes, b, 3);
  return transpose_to_index(axes, b, 3);
}

std::array<int, 3> curve_point_3d(const Grid& grid, long long k) {
  validate(CurveKind::Hilbert(), grid);
  if (grid.depth < 2) {
    throw InvalidGrid("curve_point_3d needs a 3D grid, got " + grid_str(grid));
  }
  if (k < 0 || k >= grid.cells()) {
    throw OutOfBounds("index " + std::to_string(k) + " outside [0, " +
                      std::to_string(grid.cells()) + ")");
  }
  const int b = log2_exact(grid.width);
  uint32_t axes[3];
  index_to_transpose(k, axes, b, 3);
  transpose_to_axes(axes, b, 3);
  return {static_cast<int>(axes[0]), static_cast<int>(axes[1]),
          static_cast<int>(axes[2])};
}

double locality_score(CurveKind kind, const Grid& grid) {
  validate(kind, grid);
  const long long n = static_cast<long long>(grid.height) * grid.width;
  if (n < 2) throw InvalidGrid("locality_score needs at least two cells");
  long long total = 0;
  auto prev = curve_point(kind, grid, 0);
  for (long long k = 1; k < n; ++k) {
    const auto cur = curve_point(kind, grid, k);
    total += std::llabs(cur.first - prev.first) + std::llabs(cur.second - prev.second);
    prev = cur;
  }
  return static_cast<double>(total) / static_cast<double>(n - 1);
}

}  // namespace eat::sfc
