#include "twhe/container.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "twhe/errors.hpp"

namespace twhe {

namespace {

constexpr char kMagic[8] = {'T', 'W', 'H', 'E', 'F', 'L', 'D', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("truncated field container", path);
  return v;
}

int components_of(FormType t, int n) {
  switch (t) {
    case FormType::k00: return 1;
    case FormType::k10:
    case FormType::k01: return n;
    case FormType::k11: return n * n;
  }
  return 1;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

}  // namespace

const FieldRecord* FieldContainer::find(const std::string& name, int chart) const {
  for (const auto& f : fields)
    if (f.name == name && f.chart == chart) return &f;
  return nullptr;
}

const FieldRecord& FieldContainer::require(const std::string& name, int chart) const {
  const FieldRecord* f = find(name, chart);
  if (!f) throw ConfigError("field container has no field '" + name + "' for chart " + std::to_string(chart));
  return *f;
}

void FieldContainer::add(std::string name, int chart, MatrixField f) {
  require_same_grid(*f.grid(), *grid, "FieldContainer::add");
  fields.push_back({std::move(name), chart, std::move(f)});
}

void write_container(const std::string& path, const FieldContainer& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing", path);
  const Grid& g = *c.grid;
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, g.complex_dim());
  put<std::uint32_t>(out, g.resolution());
  for (int a = 0; a < g.real_dim(); ++a) put<double>(out, g.period(a));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.order()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.banded_axes.size()));
  for (int a : c.banded_axes) put<std::int32_t>(out, a);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.fields.size()));
  std::uint64_t offset = 0;
  for (const auto& f : c.fields) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.name.size()));
    out.write(f.name.data(), static_cast<std::streamsize>(f.name.size()));
    put<std::int32_t>(out, f.chart);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(f.field.type()));
    put<std::uint32_t>(out, f.field.rank());
    put<std::uint32_t>(out, f.field.components());
    put<std::uint64_t>(out, offset);
    offset += f.field.data().size();
  }
  for (const auto& f : c.fields)
    out.write(reinterpret_cast<const char*>(f.field.data().data()),
              static_cast<std::streamsize>(f.field.data().size() * sizeof(cd)));
  if (!out) throw ConfigError("write failed", path);
}

FieldContainer read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field container", path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ConfigError("bad container magic", path);
  const int n = static_cast<int>(get<std::uint32_t>(in, path));
  const int res = static_cast<int>(get<std::uint32_t>(in, path));
  if (n < 1 || n > 2 || res < 8 || res > 4096) throw ConfigError("bad container dimensions", path);
  std::vector<double> periods(2 * n);
  for (double& p : periods) p = get<double>(in, path);
  const auto order = static_cast<FdOrder>(get<std::uint32_t>(in, path));
  if (order != FdOrder::kSecond && order != FdOrder::kFourth) throw ConfigError("bad stencil order", path);
  FieldContainer c;
  c.grid = make_grid(n, res, periods, order);
  const auto nb = get<std::uint32_t>(in, path);
  if (nb > static_cast<std::uint32_t>(2 * n)) throw ConfigError("bad chart table", path);
  for (std::uint32_t i = 0; i < nb; ++i) c.banded_axes.push_back(get<std::int32_t>(in, path));
  const auto nf = get<std::uint32_t>(in, path);
  struct Entry {
    std::string name;
    int chart;
    FormType type;
    int rank;
    std::uint64_t offset;
  };
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < nf; ++i) {
    Entry e;
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) throw ConfigError("bad field name length", path);
    e.name.resize(len);
    in.read(e.name.data(), len);
    e.chart = get<std::int32_t>(in, path);
    const auto t = get<std::uint8_t>(in, path);
    if (t > 3) throw ConfigError("bad form type for field " + e.name, path);
    e.type = static_cast<FormType>(t);
    e.rank = static_cast<int>(get<std::uint32_t>(in, path));
    const int comps = static_cast<int>(get<std::uint32_t>(in, path));
    if (e.rank < 1 || e.rank > kMaxRank || comps != components_of(e.type, n))
      throw ConfigError("bad shape for field " + e.name, path);
    e.offset = get<std::uint64_t>(in, path);
    entries.push_back(std::move(e));
  }
  const auto payload = in.tellg();
  for (const auto& e : entries) {
    MatrixField f(c.grid, e.type, e.rank);
    in.seekg(payload + static_cast<std::streamoff>(e.offset * sizeof(cd)));
    in.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(cd)));
    if (!in) throw ConfigError("truncated payload for field " + e.name, path);
    c.fields.push_back({e.name, e.chart, std::move(f)});
  }
  return c;
}

FieldContainer metric_container(const MetricField& H) {
  FieldContainer c;
  c.grid = H.grid();
  c.banded_axes = H.cover()->banded_axes();
  for (int k = 0; k < H.num_charts(); ++k) {
    EndoField f(H.grid(), H.rank());
    for (std::size_t x = 0; x < f.size(); ++x) f.at(x) = H.base_at(k, x);
    c.add("metric", k, f);
  }
  if (const RealField* lg = H.conformal_log()) {
    ComplexField f(H.grid());
    for (std::size_t x = 0; x < f.size(); ++x) f[x] = (*lg)[x];
    c.add("conformal_log", -1, f);
  }
  return c;
}

MetricField metric_from_container(const FieldContainer& c, CoverPtr cover) {
  if (!c.grid->same_shape(*cover->grid()) || c.banded_axes != cover->banded_axes())
    throw ConfigError("metric container does not match the cover");
  const int r = c.require("metric", 0).field.rank();
  MetricField H(cover, r);
  for (int k = 0; k < cover->num_charts(); ++k) {
    const MatrixField& f = c.require("metric", k).field;
    for (std::size_t x = 0; x < f.size(); ++x) H.set_base(k, x, f.get(x));
  }
  if (const FieldRecord* lg = c.find("conformal_log")) {
    RealField phi(cover->grid());
    for (std::size_t x = 0; x < phi.size(); ++x) phi[x] = lg->field.data()[x].real();
    H = H.conformally_scaled(phi);
  }
  H.id = "container";
  return H;
}

FieldContainer twist_container(const TwistData& t) {
  FieldContainer c;
  c.grid = t.cover->grid();
  c.banded_axes = t.cover->banded_axes();
  for (int k = 0; k < t.num_charts(); ++k)
    if (k < static_cast<int>(t.B.size()) && t.B[k]) c.add("B", k, *t.B[k]);
  for (const auto& [ij, f] : t.beta)
    c.add("beta:" + std::to_string(ij.first) + ":" + std::to_string(ij.second), -1, f);
  for (const auto& [ijk, f] : t.alpha)
    c.add("alpha:" + std::to_string(ijk[0]) + ":" + std::to_string(ijk[1]) + ":" + std::to_string(ijk[2]), -1, f);
  return c;
}

TwistPtr twist_from_container(const FieldContainer& c, CoverPtr cover, std::string id) {
  if (!c.grid->same_shape(*cover->grid()) || c.banded_axes != cover->banded_axes())
    throw ConfigError("twist container does not match the cover");
  auto t = std::make_shared<TwistData>();
  t->cover = cover;
  t->B.assign(cover->num_charts(), std::nullopt);
  t->id = std::move(id);
  const int nc = cover->num_charts();
  auto chart_index = [&](const std::string& s, const std::string& name) {
    const int v = std::stoi(s);
    if (v < 0 || v >= nc) throw ConfigError("chart index out of range in field " + name);
    return v;
  };
  for (const auto& f : c.fields) {
    const auto parts = split(f.name, ':');
    if (f.name == "B") {
      if (f.chart < 0 || f.chart >= nc || f.field.type() != FormType::k11 || f.field.rank() != 1)
        throw ConfigError("bad B field for chart " + std::to_string(f.chart));
      Form11Field b(c.grid);
      b.data() = f.field.data();
      t->B[f.chart] = b;
    } else if (parts[0] == "beta" && parts.size() == 3) {
      const int i = chart_index(parts[1], f.name), j = chart_index(parts[2], f.name);
      if (!(i < j) || f.field.type() != FormType::k10 || f.field.rank() != 1)
        throw ConfigError("bad beta field " + f.name);
      Form10Field b(c.grid);
      b.data() = f.field.data();
      t->beta[{i, j}] = b;
    } else if (parts[0] == "alpha" && parts.size() == 4) {
      const int i = chart_index(parts[1], f.name), j = chart_index(parts[2], f.name),
                k = chart_index(parts[3], f.name);
      if (!(i < j && j < k) || f.field.type() != FormType::k00 || f.field.rank() != 1)
        throw ConfigError("bad alpha field " + f.name);
      ComplexField a(c.grid);
      a.data() = f.field.data();
      t->alpha[{i, j, k}] = a;
    } else {
      throw ConfigError("unknown twist field " + f.name);
    }
  }
  return t;
}

}  // namespace twhe
