#include "qhf/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qhf {

namespace {

constexpr char magic[8] = {'Q', 'H', 'F', 'T', 'T', '0', '0', '1'};

template <class T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw numerics_error("checkpoint file truncated");
  return v;
}

}  // namespace

void save_state(const std::string& path, const TensorTrainState& state,
                const std::map<std::string, std::string>& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numerics_error("cannot open checkpoint for writing: " + path);
  out.write(magic, sizeof(magic));
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(state.size()));
  write_pod<double>(out, state.log_norm);
  write_pod<double>(out, state.truncation_budget);
  write_pod<std::uint8_t>(out, state.compression_warning ? 1 : 0);
  write_pod<std::int32_t>(out, state.ortho_center);
  for (const SiteTensor& t : state.tensors) {
    write_pod<std::int32_t>(out, t.dl);
    write_pod<std::int32_t>(out, t.d);
    write_pod<std::int32_t>(out, t.dr);
    for (Eigen::Index i = 0; i < t.data.size(); ++i) {
      write_pod<double>(out, t.data[i].real());
      write_pod<double>(out, t.data[i].imag());
    }
  }
  std::ostringstream mf;
  for (const auto& [k, v] : manifest) mf << k << "=" << v << "\n";
  const std::string text = mf.str();
  write_pod<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw numerics_error("checkpoint write failed: " + path);
}

TensorTrainState load_state(const std::string& path,
                            std::map<std::string, std::string>* manifest) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw numerics_error("cannot open checkpoint: " + path);
  char head[8];
  in.read(head, sizeof(head));
  if (!in || std::memcmp(head, magic, sizeof(magic)) != 0)
    throw numerics_error("not a state checkpoint: " + path);
  const auto version = read_pod<std::uint32_t>(in);
  if (version != 1) throw numerics_error("unsupported checkpoint version");

  TensorTrainState state;
  const auto n_sites = read_pod<std::uint32_t>(in);
  state.log_norm = read_pod<double>(in);
  state.truncation_budget = read_pod<double>(in);
  state.compression_warning = read_pod<std::uint8_t>(in) != 0;
  state.ortho_center = read_pod<std::int32_t>(in);
  state.tensors.reserve(n_sites);
  for (std::uint32_t k = 0; k < n_sites; ++k) {
    const auto dl = read_pod<std::int32_t>(in);
    const auto d = read_pod<std::int32_t>(in);
    const auto dr = read_pod<std::int32_t>(in);
    if (dl < 1 || d < 1 || dr < 1) throw numerics_error("corrupt checkpoint dimensions");
    SiteTensor t(dl, d, dr);
    for (Eigen::Index i = 0; i < t.data.size(); ++i) {
      const double re = read_pod<double>(in);
      const double im = read_pod<double>(in);
      t.data[i] = {re, im};
    }
    state.tensors.push_back(std::move(t));
  }
  const auto text_len = read_pod<std::uint64_t>(in);
  std::string text(text_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(text_len));
  if (!in) throw numerics_error("checkpoint file truncated");
  if (manifest) {
    manifest->clear();
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) (*manifest)[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  return state;
}

}  // namespace qhf
