#include "support/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace fixtures {

using hodgedec::SimplicialComplex;
using V3 = Eigen::Vector3d;
using Tri = std::vector<std::int32_t>;

SimplicialComplex single_triangle() {
  return hodgedec::build_complex({V3(0, 0, 0), V3(1, 0, 0), V3(0, 1, 0)}, {{0, 1, 2}});
}

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

std::vector<V3> icosahedron_vertices() {
  return {V3(-1, kPhi, 0), V3(1, kPhi, 0),  V3(-1, -kPhi, 0), V3(1, -kPhi, 0),
          V3(0, -1, kPhi), V3(0, 1, kPhi),  V3(0, -1, -kPhi), V3(0, 1, -kPhi),
          V3(kPhi, 0, -1), V3(kPhi, 0, 1),  V3(-kPhi, 0, -1), V3(-kPhi, 0, 1)};
}

std::vector<Tri> icosahedron_faces() {
  return {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

}  // namespace

SimplicialComplex icosahedron() {
  return hodgedec::build_complex(icosahedron_vertices(), icosahedron_faces());
}

SimplicialComplex tetrahedron_surface() {
  std::vector<V3> v = {V3(0, 0, 0), V3(1, 0, 0), V3(0, 1, 0), V3(0, 0, 1)};
  std::vector<Tri> f = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  return hodgedec::build_complex(std::move(v), f);
}

SimplicialComplex disk(int k, int rings) {
  std::vector<V3> v;
  v.emplace_back(0, 0, 0);
  for (int r = 1; r <= rings; ++r) {
    const double rad = static_cast<double>(r) / rings;
    for (int j = 0; j < k; ++j) {
      const double a = 2.0 * M_PI * j / k;
      v.emplace_back(rad * std::cos(a), rad * std::sin(a), 0.0);
    }
  }
  auto at = [&](int r, int j) { return static_cast<std::int32_t>(1 + (r - 1) * k + (j % k)); };
  std::vector<Tri> f;
  for (int j = 0; j < k; ++j) f.push_back({0, at(1, j), at(1, j + 1)});
  for (int r = 1; r < rings; ++r) {
    for (int j = 0; j < k; ++j) {
      f.push_back({at(r, j), at(r + 1, j), at(r + 1, j + 1)});
      f.push_back({at(r, j), at(r + 1, j + 1), at(r, j + 1)});
    }
  }
  return hodgedec::build_complex(std::move(v), f);
}

SimplicialComplex annulus(int k, int rings) {
  std::vector<V3> v;
  for (int r = 0; r < rings; ++r) {
    const double rad = 1.0 + static_cast<double>(r) / (rings - 1);
    for (int j = 0; j < k; ++j) {
      const double a = 2.0 * M_PI * j / k;
      v.emplace_back(rad * std::cos(a), rad * std::sin(a), 0.0);
    }
  }
  auto at = [&](int r, int j) { return static_cast<std::int32_t>(r * k + (j % k)); };
  std::vector<Tri> f;
  for (int r = 0; r + 1 < rings; ++r) {
    for (int j = 0; j < k; ++j) {
      f.push_back({at(r, j), at(r + 1, j), at(r + 1, j + 1)});
      f.push_back({at(r, j), at(r + 1, j + 1), at(r, j + 1)});
    }
  }
  return hodgedec::build_complex(std::move(v), f);
}

SimplicialComplex mobius_band() {
  std::vector<V3> v;
  for (int i = 0; i < 5; ++i) {
    const double a = 2.0 * M_PI * i / 5;
    v.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  std::vector<Tri> f;
  for (std::int32_t i = 0; i < 5; ++i) {
    f.push_back({i, static_cast<std::int32_t>((i + 1) % 5), static_cast<std::int32_t>((i + 2) % 5)});
  }
  return hodgedec::build_complex(std::move(v), f);
}

SimplicialComplex solid_tetrahedron() {
  return hodgedec::build_complex({V3(0, 0, 0), V3(1, 0, 0), V3(0, 1, 0), V3(0, 0, 1)},
                                 {{0, 1, 2, 3}});
}

std::string tetrahedron_obj_text() {
  return "# tetrahedron surface\n"
         "v 0 0 0\n"
         "v 1 0 0\n"
         "v 0 1 0\n"
         "v 0 0 1\n"
         "f 1 3 2\n"
         "f 1 2 4\n"
         "f 2 3 4\n"
         "f 1 4 3\n";
}

std::string icosahedron_off_text() {
  std::ostringstream out;
  out << "OFF\n12 20 0\n";
  char buf[96];
  for (const V3& p : icosahedron_vertices()) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const Tri& f : icosahedron_faces()) {
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
  return out.str();
}

}  // namespace fixtures
