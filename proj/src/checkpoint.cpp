#include "ltmn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "ltmn/errors.hpp"

namespace ltmn::training {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[8] = {'L', 'T', 'M', 'N', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string take(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() < pos_ || bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated checkpoint while reading ") + what,
                        bytes_.size());
    }
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json config_to_json(const TrainingConfig& c) {
  nlohmann::json j;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["init_std"] = c.init_std;
  j["validation_fraction"] = c.validation_fraction;
  j["seed"] = c.seed;
  j["hops"] = c.hops;
  j["dim"] = c.dim;
  j["hidden"] = c.model().hidden;
  j["max_len"] = c.max_len;
  j["grad_clip"] = c.grad_clip;
  j["tie_a_b"] = c.tie_a_b;
  j["pretrained_path"] = c.pretrained_path ? nlohmann::json(*c.pretrained_path) : nlohmann::json();
  return j;
}

TrainingConfig config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.init_std = j.at("init_std").get<double>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.hops = j.at("hops").get<std::size_t>();
  c.dim = j.at("dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.tie_a_b = j.at("tie_a_b").get<bool>();
  if (!j.at("pretrained_path").is_null()) c.pretrained_path = j.at("pretrained_path").get<std::string>();
  return c;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  nlohmann::json header;
  header["config"] = config_to_json(c.config);
  header["vocabulary"] = c.vocab.tokens();
  header["epoch"] = c.epoch;
  header["validation_ema"] = c.validation_ema;
  header["tied"] = c.params.tied;
  nlohmann::json tensors = nlohmann::json::array();
  const auto params = c.params.all();
  for (const ad::Parameter* p : params) {
    tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  }
  header["tensors"] = tensors;
  const std::string hdr = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, hdr.size());
  out += hdr;
  for (const ad::Parameter* p : params) {
    out.append(reinterpret_cast<const char*>(p->value.data()),
               static_cast<std::size_t>(p->value.size()) * sizeof(double));
  }
  put<std::uint64_t>(out, fnv1a(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError("not an LTMN checkpoint (bad magic)", 0);
  }
  const std::size_t version_at = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kCheckpointVersion) + ")",
                      version_at);
  }
  const auto hdr_len = r.get<std::uint64_t>("header length");
  const std::size_t hdr_at = r.pos();
  const std::string hdr = r.take(static_cast<std::size_t>(hdr_len), "header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hdr);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), hdr_at);
  }

  Checkpoint c;
  try {
    c.config = config_from_json(header.at("config"));
    c.vocab = corpus::Vocabulary::from_tokens(header.at("vocabulary").get<std::vector<std::string>>());
    c.epoch = header.at("epoch").get<std::size_t>();
    c.validation_ema = header.at("validation_ema").get<double>();
    if (header.at("tied").get<bool>() != c.config.tie_a_b) {
      throw FormatError("tied flag disagrees with config", hdr_at);
    }
    c.params = ModelParameters::zeros(c.vocab.size(), c.config.model());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), hdr_at);
  } catch (const ContractError& e) {
    throw FormatError(std::string("inconsistent header: ") + e.what(), hdr_at);
  }

  const auto& table = header.at("tensors");
  auto params = c.params.all();
  if (!table.is_array() || table.size() != params.size()) {
    throw FormatError("tensor table does not match the model layout", hdr_at);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Parameter* p = params[i];
    const auto& t = table[i];
    if (t.at("name").get<std::string>() != p->name || t.at("rows").get<Eigen::Index>() != p->value.rows() ||
        t.at("cols").get<Eigen::Index>() != p->value.cols()) {
      throw FormatError("tensor " + std::to_string(i) + " (" + t.dump() + ") does not match " +
                            p->name + " " + ad::shape_str(p->value),
                        hdr_at);
    }
  }
  for (ad::Parameter* p : params) {
    const std::size_t n = static_cast<std::size_t>(p->value.size()) * sizeof(double);
    const std::string raw = r.take(n, p->name.c_str());
    std::memcpy(p->value.data(), raw.data(), n);
  }
  const std::size_t hash_at = r.pos();
  const auto stored = r.get<std::uint64_t>("checksum");
  if (stored != fnv1a(bytes.data(), hash_at)) throw FormatError("checksum mismatch", hash_at);
  if (r.pos() != bytes.size()) throw FormatError("trailing bytes after checksum", r.pos());
  c.params.zero_grad();
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  const std::string bytes = encode_checkpoint(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace ltmn::training
