#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "tgae/encoder.hpp"
#include "tgae/features.hpp"

namespace tgae {

// "TGAECKPT" | u32 version | config block | u64 block count |
// per block: u64 rows, u64 cols, f64 values. Little-endian throughout.
inline constexpr char kCheckpointMagic[8] = {'T', 'G', 'A', 'E', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  EncoderConfig config;
  EncoderParams params;
};

inline void save_params(std::ostream& os, const EncoderConfig& cfg, const EncoderParams& params) {
  Encoder(cfg).check_params(params);
  using detail::write_le;
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  write_le<std::uint32_t>(os, kCheckpointVersion);
  write_le<std::uint64_t>(os, cfg.input_dim);
  write_le<std::uint64_t>(os, cfg.hidden_dim);
  write_le<std::uint64_t>(os, cfg.num_layers);
  write_le<std::uint64_t>(os, cfg.mlp_in_hidden);
  write_le<std::uint64_t>(os, cfg.mlp_out_hidden);
  write_le<std::uint64_t>(os, cfg.output_dim);
  write_le<std::uint64_t>(os, cfg.propagation_hops);
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.activation));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(cfg.skip));
  write_le<std::uint64_t>(os, cfg.seed);
  write_le<std::uint64_t>(os, params.num_blocks());
  for (const auto& b : params.blocks()) {
    write_le<std::uint64_t>(os, b.value.rows());
    write_le<std::uint64_t>(os, b.value.cols());
    for (double v : b.value.values()) write_le<double>(os, v);
  }
  if (!os) throw FormatError("failed writing checkpoint");
}

inline Checkpoint load_checkpoint(std::istream& is) {
  using detail::read_le;
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw FormatError("not a checkpoint file (bad magic)");
  const auto version = read_le<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  Checkpoint ck;
  auto& c = ck.config;
  c.input_dim = read_le<std::uint64_t>(is, "config");
  c.hidden_dim = read_le<std::uint64_t>(is, "config");
  c.num_layers = read_le<std::uint64_t>(is, "config");
  c.mlp_in_hidden = read_le<std::uint64_t>(is, "config");
  c.mlp_out_hidden = read_le<std::uint64_t>(is, "config");
  c.output_dim = read_le<std::uint64_t>(is, "config");
  c.propagation_hops = read_le<std::uint64_t>(is, "config");
  const auto act = read_le<std::uint32_t>(is, "config");
  const auto skip = read_le<std::uint32_t>(is, "config");
  if (act > 1 || skip > 1) throw FormatError("checkpoint config has an unknown enum value");
  c.activation = static_cast<Activation>(act);
  c.skip = static_cast<SkipMode>(skip);
  c.seed = read_le<std::uint64_t>(is, "config");
  // Guard against absurd sizes in a corrupt header before allocating.
  if (c.input_dim > (1u << 20) || c.hidden_dim > (1u << 20) || c.num_layers > 4096 ||
      c.mlp_in_hidden > (1u << 20) || c.mlp_out_hidden > (1u << 20) || c.output_dim > (1u << 20) ||
      c.propagation_hops > 4096)
    throw FormatError("checkpoint config block is implausible (corrupt file?)");
  try {
    ck.params = EncoderParams::zeros(c);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint config block is invalid: ") + e.what());
  }
  const auto count = read_le<std::uint64_t>(is, "block count");
  if (count != ck.params.num_blocks())
    throw FormatError("checkpoint holds " + std::to_string(count) + " tensors, config implies " +
                      std::to_string(ck.params.num_blocks()));
  for (auto& b : ck.params.blocks()) {
    const auto rows = read_le<std::uint64_t>(is, "tensor shape");
    const auto cols = read_le<std::uint64_t>(is, "tensor shape");
    if (rows != b.value.rows() || cols != b.value.cols())
      throw FormatError("tensor '" + b.name + "' stored as " + std::to_string(rows) + "x" + std::to_string(cols) +
                        ", config implies " + std::to_string(b.value.rows()) + "x" +
                        std::to_string(b.value.cols()));
    for (auto& v : b.value.values()) v = read_le<double>(is, "tensor data");
  }
  return ck;
}

/// Loads parameters that must fit `expected`; a different architecture is a
/// ShapeError.
inline EncoderParams load_params(std::istream& is, const EncoderConfig& expected) {
  Checkpoint ck = load_checkpoint(is);
  Encoder(expected).check_params(ck.params);
  return std::move(ck.params);
}

inline void save_checkpoint_file(const std::string& path, const EncoderConfig& cfg, const EncoderParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  save_params(os, cfg, params);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint '" + path + "'");
  return load_checkpoint(is);
}

}  // namespace tgae
