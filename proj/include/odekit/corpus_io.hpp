#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "odekit/corpus.hpp"

namespace odekit {

static_assert(std::endian::native == std::endian::little,
              "corpus files are little-endian; big-endian hosts are unsupported");

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace io {

inline constexpr char kCorpusMagic[4] = {'F', 'M', 'N', 'T'};
inline constexpr std::uint32_t kCorpusVersion = 1;

inline void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}
template <class T>
void put(std::string& out, T v) {
  put_bytes(out, &v, sizeof(T));
}

struct Reader {
  const char* p;
  const char* end;
  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n) throw FormatError("truncated corpus file");
  }
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
  }
  void get_bytes(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, p, n);
    p += n;
  }
};

// Hex floats round-trip doubles exactly through the text manifest.
inline std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write: " + path);
}

}  // namespace io

inline std::string manifest_path(const std::string& corpus_path) {
  return corpus_path + ".manifest";
}

inline std::string encode_corpus_records(const Corpus& corpus) {
  std::string out;
  io::put_bytes(out, io::kCorpusMagic, 4);
  io::put<std::uint32_t>(out, io::kCorpusVersion);
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(corpus.records.size()));
  for (const CorpusRecord& r : corpus.records) {
    std::string rec;
    const int dim = system_dim(r.system);
    io::put<std::uint8_t>(rec, static_cast<std::uint8_t>(r.system));
    io::put<std::uint8_t>(rec, static_cast<std::uint8_t>(dim));
    io::put<std::uint32_t>(rec, static_cast<std::uint32_t>(r.stride));
    io::put<double>(rec, r.dt);
    io::put<std::uint32_t>(rec, static_cast<std::uint32_t>(r.n_coarse));
    for (std::size_t i = 0; i < r.params.count; ++i) io::put<double>(rec, r.params[i]);
    for (int d = 0; d < dim; ++d) io::put<double>(rec, r.ic[d]);
    for (const Vec& u : r.coarse)
      for (int d = 0; d < dim; ++d) io::put<double>(rec, u[d]);
    for (const Vec& e : r.err)
      for (int d = 0; d < dim; ++d) io::put<double>(rec, e[d]);
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.size()));
    out += rec;
  }
  return out;
}

inline std::string encode_corpus_manifest(const Corpus& corpus) {
  const SystemInfo& info = system_info(corpus.system);
  std::ostringstream m;
  m << "odekit-corpus-manifest v1\n";
  m << "system " << info.name << "\n";
  m << "scheme " << scheme_name(corpus.gen.scheme) << "\n";
  if (corpus.gen.regime)
    m << "regime " << *corpus.gen.regime << "\n";
  else
    m << "range " << (corpus.gen.range == RangeTag::Pretraining ? "pretrain" : "test") << "\n";
  m << "seed " << corpus.seed << "\n";
  m << "n_variations " << corpus.n_variations << "\n";
  m << "n_trajectories " << corpus.n_trajectories << "\n";
  m << "n_coarse " << corpus.gen.n_coarse << "\n";
  m << "excluded " << corpus.excluded << "\n";
  m << "stats_dim " << corpus.stats.dim << "\n";
  for (int d = 0; d < corpus.stats.dim; ++d)
    m << "stats " << d << " " << io::hexf(corpus.stats.mean[d]) << " "
      << io::hexf(corpus.stats.scale[d]) << " " << io::hexf(corpus.stats.err_scale[d]) << "\n";
  m << "records " << corpus.records.size() << "\n";
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const CorpusRecord& r = corpus.records[i];
    m << "record " << i << " " << r.variation << " " << r.traj_index << " " << r.ic_seed << " "
      << (r.split == SplitTag::Train ? "train" : "test") << "\n";
  }
  return m.str();
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  io::write_file(path, encode_corpus_records(corpus));
  io::write_file(manifest_path(path), encode_corpus_manifest(corpus));
}

inline Corpus decode_corpus_records(const std::string& bytes) {
  io::Reader rd{bytes.data(), bytes.data() + bytes.size()};
  char magic[4];
  rd.get_bytes(magic, 4);
  if (std::memcmp(magic, io::kCorpusMagic, 4) != 0)
    throw FormatError("bad corpus magic; not a corpus file");
  const auto version = rd.get<std::uint32_t>();
  if (version != io::kCorpusVersion)
    throw FormatError("unsupported corpus version " + std::to_string(version));
  const auto count = rd.get<std::uint32_t>();

  Corpus corpus;
  corpus.records.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = rd.get<std::uint32_t>();
    rd.need(len);
    io::Reader rr{rd.p, rd.p + len};
    rd.p += len;

    CorpusRecord& r = corpus.records[i];
    const auto sys = rr.get<std::uint8_t>();
    if (sys >= kNumSystems) throw FormatError("bad system id in record");
    r.system = static_cast<SystemId>(sys);
    const auto dim = rr.get<std::uint8_t>();
    if (dim != system_dim(r.system)) throw FormatError("dimension mismatch in record");
    r.stride = static_cast<int>(rr.get<std::uint32_t>());
    r.dt = rr.get<double>();
    r.n_coarse = static_cast<int>(rr.get<std::uint32_t>());

    const SystemInfo& info = system_info(r.system);
    r.params.system = r.system;
    r.params.count = info.param_names.size();
    for (std::size_t j = 0; j < r.params.count; ++j) r.params[j] = rr.get<double>();
    r.ic = Vec(dim);
    for (int d = 0; d < dim; ++d) r.ic[d] = rr.get<double>();
    r.coarse.assign(static_cast<std::size_t>(r.n_coarse) + 1, Vec(dim));
    for (Vec& u : r.coarse)
      for (int d = 0; d < dim; ++d) u[d] = rr.get<double>();
    r.err.assign(static_cast<std::size_t>(r.n_coarse), Vec(dim));
    for (Vec& e : r.err)
      for (int d = 0; d < dim; ++d) e[d] = rr.get<double>();
    if (rr.p != rr.end) throw FormatError("trailing bytes in record");
  }
  if (count > 0) corpus.system = corpus.records[0].system;
  return corpus;
}

inline void parse_corpus_manifest(const std::string& text, Corpus& corpus) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "odekit-corpus-manifest v1")
    throw FormatError("bad manifest header");
  std::size_t record_count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "system") {
      std::string name;
      ls >> name;
      const SystemInfo* info = find_system(name);
      if (info == nullptr) throw FormatError("unknown system in manifest: " + name);
      corpus.system = info->id;
    } else if (key == "scheme") {
      std::string s;
      ls >> s;
      corpus.gen.scheme = (s == "euler") ? StepScheme::Euler : StepScheme::RK4;
    } else if (key == "range") {
      std::string s;
      ls >> s;
      corpus.gen.range = (s == "pretrain") ? RangeTag::Pretraining : RangeTag::Testing;
    } else if (key == "regime") {
      std::string s;
      ls >> s;
      corpus.gen.regime = s;
    } else if (key == "seed") {
      ls >> corpus.seed;
    } else if (key == "n_variations") {
      ls >> corpus.n_variations;
    } else if (key == "n_trajectories") {
      ls >> corpus.n_trajectories;
    } else if (key == "n_coarse") {
      ls >> corpus.gen.n_coarse;
    } else if (key == "excluded") {
      ls >> corpus.excluded;
    } else if (key == "stats_dim") {
      ls >> corpus.stats.dim;
    } else if (key == "stats") {
      int d;
      std::string a, b, c;
      ls >> d >> a >> b >> c;
      if (d < 0 || d >= kMaxDim) throw FormatError("bad stats dimension");
      corpus.stats.mean[d] = std::strtod(a.c_str(), nullptr);
      corpus.stats.scale[d] = std::strtod(b.c_str(), nullptr);
      corpus.stats.err_scale[d] = std::strtod(c.c_str(), nullptr);
    } else if (key == "records") {
      ls >> record_count;
    } else if (key == "record") {
      std::size_t idx;
      int variation, traj;
      std::uint64_t seed;
      std::string split;
      ls >> idx >> variation >> traj >> seed >> split;
      if (idx >= corpus.records.size()) throw FormatError("record index out of range in manifest");
      corpus.records[idx].variation = variation;
      corpus.records[idx].traj_index = traj;
      corpus.records[idx].ic_seed = seed;
      corpus.records[idx].split = (split == "test") ? SplitTag::Test : SplitTag::Train;
    }
  }
  if (record_count != corpus.records.size())
    throw FormatError("manifest record count does not match corpus file");
  if (!corpus.records.empty()) {
    corpus.gen.dt = corpus.records[0].dt;
    corpus.gen.stride = corpus.records[0].stride;
  }
}

inline Corpus load_corpus(const std::string& path) {
  Corpus corpus = decode_corpus_records(io::read_file(path));
  parse_corpus_manifest(io::read_file(manifest_path(path)), corpus);
  return corpus;
}

}  // namespace odekit
