#pragma once

// Self-describing checkpoint container.
//
//   bytes 0..7   magic "LTMNCKPT"
//   u32          format version
//   u64          header length H
//   H bytes      JSON header: config, vocabulary, epoch, validation EMA and
//                the ordered tensor table [{name, rows, cols}]
//   doubles      each tensor's entries in row-major order, IEEE-754 binary64
//   u64          FNV-1a hash of every preceding byte
//
// All integers and doubles are little-endian.

#include <cstddef>
#include <cstdint>
#include <string>

#include "ltmn/corpus.hpp"
#include "ltmn/model.hpp"
#include "ltmn/training.hpp"

namespace ltmn::training {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainingConfig config;
  corpus::Vocabulary vocab;
  ModelParameters params;
  std::size_t epoch = 0;
  double validation_ema = 0.0;
};

std::string encode_checkpoint(const Checkpoint& c);
// Throws FormatError (with the byte offset) on a bad magic, unsupported
// version, truncation, hash mismatch or inconsistent tensor table.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ltmn::training
