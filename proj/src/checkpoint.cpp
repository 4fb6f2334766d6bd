#include "agelab/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace agelab {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'E', 'Q'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

std::uint32_t get_u32(std::istream& in) {
  char buf[4];
  if (!in.read(buf, 4)) throw TruncatedFileError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& in) {
  char buf[8];
  if (!in.read(buf, 8)) throw TruncatedFileError("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const neural::QNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(net.layer_dims.size()));
  for (const int dim : net.layer_dims) put_u32(out, static_cast<std::uint32_t>(dim));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(out, w(r, c));
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) put_f64(out, net.biases[l](r));
  }
  if (!out) throw CheckpointError("checkpoint: write failed: " + path.string());
}

neural::QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open for reading: " + path.string());
  char magic[4];
  if (!in.read(magic, 4)) throw TruncatedFileError("checkpoint: truncated file");
  if (std::memcmp(magic, kMagic, 4) != 0) throw BadMagicError("checkpoint: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw VersionMismatchError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t layer_count = get_u32(in);
  if (layer_count < 2) throw CheckpointError("checkpoint: fewer than two layers");

  neural::QNetwork net;
  net.layer_dims.resize(layer_count);
  for (auto& dim : net.layer_dims) dim = static_cast<int>(get_u32(in));
  for (std::uint32_t l = 0; l + 1 < layer_count; ++l) {
    neural::Matrix w(net.layer_dims[l + 1], net.layer_dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_f64(in);
    }
    neural::Vector b(net.layer_dims[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = get_f64(in);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

}  // namespace agelab
