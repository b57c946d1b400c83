#include "aeroforecast/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "aeroforecast/io_util.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace aero {

namespace {

constexpr char kMagic[4] = {'A', 'F', 'M', '1'};
constexpr std::uint16_t kFormatVersion = 1;

constexpr std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int b = 0; b < 8; ++b) {
      c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

struct Writer {
  std::string buf;

  void bytes(const void* p, std::size_t n) {
    buf.append(static_cast<const char*>(p), n);
  }
  void u16(std::uint16_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    if (s.size() > 0xFFFF) throw SerializationError("string too long to serialize");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void tensor(const Tensor& t) {
    u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) u32(static_cast<std::uint32_t>(d));
    bytes(t.data().data(), t.size() * sizeof(double));
  }
};

struct Reader {
  std::span<const unsigned char> data;
  std::size_t pos = 0;

  void bytes(void* out, std::size_t n) {
    if (pos + n > data.size()) {
      throw TruncationError("model payload ends early at byte " + std::to_string(pos));
    }
    std::memcpy(out, data.data() + pos, n);
    pos += n;
  }
  std::uint16_t u16() { std::uint16_t v; bytes(&v, sizeof v); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
  void skip(std::uint64_t n) {
    if (n > data.size() || pos + n > data.size()) {
      throw TruncationError("model payload ends early at byte " + std::to_string(pos));
    }
    pos += n;
  }
  std::string str() {
    std::uint16_t n = u16();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void tensor_into(Tensor& t) {
    std::uint32_t rank = u32();
    if (rank != t.rank()) {
      throw SerializationError("tensor rank " + std::to_string(rank) +
                               " does not match expected " + t.shape_str());
    }
    for (std::size_t i = 0; i < rank; ++i) {
      std::uint32_t d = u32();
      if (d != t.dim(i)) {
        throw SerializationError("tensor dim mismatch, expected " + t.shape_str());
      }
    }
    bytes(t.data().data(), t.size() * sizeof(double));
  }
};

void write_payload(Writer& w, const Model& model) {
  const ModelConfig& c = model.config();
  for (std::size_t v : {c.conv_filters, c.kernel_size, c.pool_width, c.lstm1_units,
                        c.lstm2_units, c.dense1_units, c.dense2_units, c.lookback,
                        c.feature_count}) {
    w.u32(static_cast<std::uint32_t>(v));
  }

  const NormalizationStats& s = model.stats();
  w.u32(static_cast<std::uint32_t>(s.feature_count()));
  for (std::size_t i = 0; i < s.feature_count(); ++i) {
    const FeatureStats& f = s.feature(i);
    w.str(f.name);
    w.f64(f.min);
    w.f64(f.max);
  }
  w.u32(static_cast<std::uint32_t>(s.target_index()));

  auto groups = const_cast<Model&>(model).layer_parameters();
  w.u32(static_cast<std::uint32_t>(groups.size()));
  for (const auto& group : groups) {
    w.u32(static_cast<std::uint32_t>(group.size()));
    for (const Tensor* t : group) w.tensor(*t);
  }
}

}  // namespace

std::uint32_t crc32(std::span<const unsigned char> bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char b : bytes) {
    c = kCrcTable[(c ^ b) & 0xFFu] ^ (c >> 8);
  }
  return c ^ 0xFFFFFFFFu;
}

std::string serialize_model(const Model& model) {
  Writer payload;
  write_payload(payload, model);

  Writer out;
  out.bytes(kMagic, sizeof kMagic);
  out.u16(kFormatVersion);
  out.buf += payload.buf;
  out.u32(crc32(payload.buf));
  return std::move(out.buf);
}

namespace {

// Walks the payload framing without allocating anything, so a shortened file
// surfaces as TruncationError before the checksum is consulted.
void check_payload_framing(std::span<const unsigned char> payload) {
  Reader r{payload};
  for (int i = 0; i < 9; ++i) r.u32();  // model config

  std::uint32_t n_features = r.u32();
  if (n_features > 100000) {
    throw SerializationError("implausible feature count " + std::to_string(n_features));
  }
  for (std::uint32_t i = 0; i < n_features; ++i) {
    std::uint16_t name_len = r.u16();
    r.skip(name_len);
    r.f64();
    r.f64();
  }
  r.u32();  // target index

  std::uint32_t n_layers = r.u32();
  if (n_layers > 1000) {
    throw SerializationError("implausible layer count " + std::to_string(n_layers));
  }
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    std::uint32_t n_tensors = r.u32();
    if (n_tensors > 1000) {
      throw SerializationError("implausible tensor count " + std::to_string(n_tensors));
    }
    for (std::uint32_t t = 0; t < n_tensors; ++t) {
      std::uint32_t rank = r.u32();
      if (rank > 8) throw SerializationError("implausible tensor rank");
      std::uint64_t elems = 1;
      for (std::uint32_t d = 0; d < rank; ++d) {
        std::uint32_t dim = r.u32();
        if (dim == 0 || dim > 100000000u) {
          throw SerializationError("implausible tensor dimension");
        }
        elems *= dim;
        if (elems > (1ull << 40)) throw SerializationError("implausible tensor size");
      }
      r.skip(elems * sizeof(double));
    }
  }
  if (r.pos != payload.size()) {
    throw SerializationError("model payload has " +
                             std::to_string(payload.size() - r.pos) + " trailing bytes");
  }
}

}  // namespace

Model deserialize_model(std::span<const unsigned char> bytes) {
  constexpr std::size_t header = sizeof kMagic + sizeof(std::uint16_t);
  if (bytes.size() < header + sizeof(std::uint32_t)) {
    throw TruncationError("model file too short (" + std::to_string(bytes.size()) +
                          " bytes)");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw VersionError("not a model file (bad magic bytes)");
  }
  std::uint16_t version;
  std::memcpy(&version, bytes.data() + sizeof kMagic, sizeof version);
  if (version != kFormatVersion) {
    throw VersionError("unsupported model format version " + std::to_string(version) +
                       ", expected " + std::to_string(kFormatVersion));
  }

  std::span<const unsigned char> payload = bytes.subspan(header, bytes.size() - header - 4);
  check_payload_framing(payload);

  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, sizeof stored);
  if (crc32(payload) != stored) {
    throw ChecksumError("model payload checksum mismatch");
  }

  try {
    Reader r{payload};
    ModelConfig cfg;
    cfg.conv_filters = r.u32();
    cfg.kernel_size = r.u32();
    cfg.pool_width = r.u32();
    cfg.lstm1_units = r.u32();
    cfg.lstm2_units = r.u32();
    cfg.dense1_units = r.u32();
    cfg.dense2_units = r.u32();
    cfg.lookback = r.u32();
    cfg.feature_count = r.u32();

    std::uint32_t n_features = r.u32();
    std::vector<FeatureStats> feats;
    feats.reserve(n_features);
    for (std::uint32_t i = 0; i < n_features; ++i) {
      FeatureStats f;
      f.name = r.str();
      f.min = r.f64();
      f.max = r.f64();
      feats.push_back(std::move(f));
    }
    std::uint32_t target_index = r.u32();

    Model model(cfg, NormalizationStats(std::move(feats), target_index), /*seed=*/0);

    auto groups = model.layer_parameters();
    std::uint32_t n_layers = r.u32();
    if (n_layers != groups.size()) {
      throw SerializationError("model file has " + std::to_string(n_layers) +
                               " layers, expected " + std::to_string(groups.size()));
    }
    for (auto& group : groups) {
      std::uint32_t n_tensors = r.u32();
      if (n_tensors != group.size()) {
        throw SerializationError("layer tensor count mismatch");
      }
      for (Tensor* t : group) r.tensor_into(*t);
    }
    for (const Tensor* t : model.parameters()) ensure_finite(*t, "load_model");
    return model;
  } catch (const SerializationError&) {
    throw;
  } catch (const Error& e) {
    // config/stats/tensor validation tripping on a checksum-valid payload
    // still means the file contents are unusable
    throw SerializationError(std::string("model file contents invalid: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

Model load_model(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return deserialize_model(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

std::uint32_t params_crc32(const Model& model) {
  Writer w;
  auto groups = const_cast<Model&>(model).layer_parameters();
  for (const auto& group : groups) {
    for (const Tensor* t : group) w.tensor(*t);
  }
  return crc32(w.buf);
}

}  // namespace aero
