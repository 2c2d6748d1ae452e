// src/runner/checkpoint.cc

// Copyright 2026  The avsrbench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "avsr/runner/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

constexpr char kMagic[8] = {'A', 'V', 'S', 'R', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void PutString(std::ostream& os, const std::string& s, bool wide) {
  if (wide) {
    Put<std::uint64_t>(os, s.size());
  } else {
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  }
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  template <typename T>
  T Get() {
    T v;
    Read(&v, sizeof v);
    return v;
  }
  std::string GetString(bool wide) {
    const std::uint64_t n = wide ? Get<std::uint64_t>() : Get<std::uint32_t>();
    if (n > (1ULL << 32)) Fail(path_, ": corrupt checkpoint (string of ", n, " bytes)");
    std::string s(n, '\0');
    Read(s.data(), n);
    return s;
  }
  void Read(void* dst, std::size_t n) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!is_) Fail(path_, ": truncated checkpoint");
  }

 private:
  std::istream& is_;
  std::string path_;
};

}  // namespace

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot open for writing: ", path);
  os.write(kMagic, sizeof kMagic);
  Put(os, kVersion);
  PutString(os, ckpt.config.ToString(), true);
  std::string vocab;
  for (const auto& p : ckpt.vocab.pieces()) vocab += p + "\n";
  PutString(os, vocab, true);
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& [name, t] : ckpt.arrays) {
    PutString(os, name, false);
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(t.Rank()));
    for (int d : t.Shape()) Put<std::int32_t>(os, d);
    os.write(reinterpret_cast<const char*>(t.Data()),
             static_cast<std::streamsize>(t.Size() * sizeof(double)));
  }
  if (!os) Fail("write failed: ", path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open checkpoint: ", path);
  Reader r(is, path);
  char magic[8];
  r.Read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) Fail(path, ": not a checkpoint file");
  const auto version = r.Get<std::uint32_t>();
  if (version != kVersion) Fail(path, ": unsupported checkpoint version ", version);
  Checkpoint ckpt;
  ckpt.config = Config::Parse(r.GetString(true), path + " (config)");
  {
    std::stringstream ss(r.GetString(true));
    std::vector<std::string> pieces;
    std::string line;
    while (std::getline(ss, line)) pieces.push_back(line);
    if (!pieces.empty()) ckpt.vocab = Vocabulary(std::move(pieces));
  }
  const auto count = r.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.GetString(false);
    const auto rank = r.Get<std::uint32_t>();
    if (rank > 8) Fail(path, ": corrupt checkpoint (rank ", rank, ")");
    std::vector<int> shape(rank);
    for (auto& d : shape) {
      d = r.Get<std::int32_t>();
      if (d < 0) Fail(path, ": corrupt checkpoint (negative dimension)");
    }
    Tensor t(shape);
    r.Read(t.Data(), t.Size() * sizeof(double));
    if (!ckpt.arrays.emplace(std::move(name), std::move(t)).second) {
      Fail(path, ": duplicate array name");
    }
  }
  return ckpt;
}

Checkpoint MakeCheckpoint(const AvsrModel& model, const Vocabulary& vocab, const Config& meta) {
  Checkpoint ckpt;
  ckpt.config = meta;
  WriteModelConfig(model.config(), ckpt.config);
  ckpt.vocab = vocab;
  for (const auto* p : model.params().All()) ckpt.arrays.emplace(p->name, p->value);
  return ckpt;
}

std::unique_ptr<AvsrModel> RestoreModel(const Checkpoint& ckpt) {
  const ModelConfig cfg = ReadModelConfig(ckpt.config);
  if (ckpt.vocab.size() != cfg.vocab_size) {
    Fail("checkpoint vocabulary has ", ckpt.vocab.size(), " pieces but the model expects ",
         cfg.vocab_size);
  }
  auto model = std::make_unique<AvsrModel>(cfg);
  std::size_t matched = 0;
  for (auto* p : model->params().All()) {
    auto it = ckpt.arrays.find(p->name);
    if (it == ckpt.arrays.end()) Fail("checkpoint is missing array '", p->name, "'");
    if (!it->second.SameShape(p->value)) {
      Fail("array '", p->name, "' has shape ", it->second.ShapeString(), " in the checkpoint but ",
           p->value.ShapeString(), " in the model");
    }
    p->value = it->second;
    ++matched;
  }
  if (matched != ckpt.arrays.size()) Fail("checkpoint has arrays the model does not use");
  return model;
}

}  // namespace avsr
