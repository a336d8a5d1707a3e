#include "hodgedec/mesh_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace hodgedec {

namespace {

// Next token, skipping whitespace and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  do {
    tok.push_back(static_cast<char>(c));
  } while ((c = in.get()) != EOF && !std::isspace(c) && c != '#');
  if (c == '#') in.unget();
  return true;
}

long parse_int(const std::string& tok, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("expected ") + what + ", got '" + tok + "'");
  }
  return value;
}

double parse_double(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected ") + what + ", got '" + tok + "'");
  }
}

SimplicialComplex finish(std::vector<Eigen::Vector3d> vertices,
                         const std::vector<std::vector<std::int32_t>>& faces) {
  try {
    return build_complex(std::move(vertices), faces);
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("invalid mesh: ") + e.what());
  }
}

SimplicialComplex load_off(std::istream& in) {
  std::string tok;
  if (!next_token(in, tok) || tok != "OFF") {
    throw ParseError("missing OFF header");
  }
  auto read_count = [&](const char* what) {
    if (!next_token(in, tok)) throw ParseError(std::string("truncated header: ") + what);
    const long v = parse_int(tok, what);
    if (v < 0) throw ParseError(std::string("negative ") + what);
    return v;
  };
  const long nv = read_count("vertex count");
  const long nf = read_count("face count");
  read_count("edge count");  // ignored

  std::vector<Eigen::Vector3d> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    Eigen::Vector3d p;
    for (int k = 0; k < 3; ++k) {
      if (!next_token(in, tok)) throw ParseError("truncated vertex list");
      p[k] = parse_double(tok, "vertex coordinate");
    }
    vertices.push_back(p);
  }

  std::vector<std::vector<std::int32_t>> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  for (long i = 0; i < nf; ++i) {
    if (!next_token(in, tok)) throw ParseError("truncated face list");
    const long arity = parse_int(tok, "face vertex count");
    if (arity != 3) {
      throw ParseError("face with " + std::to_string(arity) + " vertices; only triangles load");
    }
    std::vector<std::int32_t> f(3);
    for (int k = 0; k < 3; ++k) {
      if (!next_token(in, tok)) throw ParseError("truncated face list");
      const long v = parse_int(tok, "face vertex index");
      if (v < 0 || v >= nv) throw ParseError("face vertex index out of range");
      f[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(v);
    }
    faces.push_back(std::move(f));
  }
  return finish(std::move(vertices), faces);
}

SimplicialComplex load_obj(std::istream& in) {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::vector<std::int32_t>> faces;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "v") {
      Eigen::Vector3d p;
      if (!(ls >> p[0] >> p[1] >> p[2])) {
        throw ParseError("line " + std::to_string(lineno) + ": bad vertex");
      }
      vertices.push_back(p);
    } else if (key == "f") {
      std::vector<std::int32_t> f;
      std::string ref;
      while (ls >> ref) {
        // take the position index, dropping /texture and /normal refs
        const std::string head = ref.substr(0, ref.find('/'));
        long v = parse_int(head, "face vertex index");
        if (v < 0) v += static_cast<long>(vertices.size()) + 1;
        if (v < 1 || v > static_cast<long>(vertices.size())) {
          throw ParseError("line " + std::to_string(lineno) + ": face vertex index out of range");
        }
        f.push_back(static_cast<std::int32_t>(v - 1));
      }
      if (f.size() != 3) {
        throw ParseError("line " + std::to_string(lineno) + ": face with " +
                         std::to_string(f.size()) + " vertices; only triangles load");
      }
      faces.push_back(std::move(f));
    }
    // vn, vt, o, g, s, usemtl, mtllib: ignored
  }
  if (vertices.empty() || faces.empty()) {
    throw ParseError("OBJ stream has no triangles");
  }
  return finish(std::move(vertices), faces);
}

}  // namespace

SimplicialComplex load_mesh(std::istream& in, MeshFormat format) {
  switch (format) {
    case MeshFormat::off:
      return load_off(in);
    case MeshFormat::obj:
      return load_obj(in);
  }
  throw InvalidParameter("unknown mesh format");
}

SimplicialComplex load_mesh(const std::filesystem::path& path) {
  MeshFormat format;
  const auto ext = path.extension().string();
  if (ext == ".off") {
    format = MeshFormat::off;
  } else if (ext == ".obj") {
    format = MeshFormat::obj;
  } else {
    throw InvalidParameter("cannot infer mesh format from '" + path.string() + "'");
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return load_mesh(in, format);
}

void write_off(std::ostream& out, const SimplicialComplex& K) {
  if (K.dim() != 2) throw InvalidParameter("OFF output needs a surface complex");
  out << "OFF\n"
      << K.num_vertices() << ' ' << K.num_simplices(2) << ' ' << K.num_simplices(1) << '\n';
  char buf[96];
  for (const auto& p : K.vertex_positions()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  for (const Simplex& t : K.simplices(2)) {
    std::int32_t a = t.vertices[0], b = t.vertices[1], c = t.vertices[2];
    if (t.orientation < 0) std::swap(a, b);
    out << "3 " << a << ' ' << b << ' ' << c << '\n';
  }
}

}  // namespace hodgedec
