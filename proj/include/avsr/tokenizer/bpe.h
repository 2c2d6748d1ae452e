// include/avsr/tokenizer/bpe.h

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

#ifndef AVSR_TOKENIZER_BPE_H_
#define AVSR_TOKENIZER_BPE_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "avsr/data/manifest.h"

namespace avsr {

inline constexpr int kBlankId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kSosId = 2;
inline constexpr int kEosId = 3;
inline constexpr int kNumReserved = 4;

// Word-boundary marker (U+2581) and the glyph unknown pieces decode to.
inline constexpr const char* kSpaceMarker = "\xE2\x96\x81";
inline constexpr const char* kReplacementGlyph = "\xEF\xBF\xBD";

using TokenSequence = std::vector<int>;

class Vocabulary {
 public:
  Vocabulary() = default;
  // `pieces` must start with the four reserved pieces.
  explicit Vocabulary(std::vector<std::string> pieces);

  int size() const { return static_cast<int>(pieces_.size()); }
  const std::string& piece(int id) const;
  const std::vector<std::string>& pieces() const { return pieces_; }
  int Find(const std::string& piece) const;  // -1 if absent

  // Greedy longest match over pieces; spaces become the boundary marker and
  // characters without a piece become unk.
  TokenSequence Encode(const std::string& text) const;
  std::string Decode(const TokenSequence& ids) const;

  void Save(const std::string& path) const;
  static Vocabulary Load(const std::string& path);

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  std::size_t max_piece_bytes_ = 0;
};

// Byte-pair-style merges over UTF-8 code points until the vocabulary has
// exactly `size` entries (reserved + characters + merges). Pair ties go to
// the lexicographically smallest (left, right).
Vocabulary TrainVocabulary(const std::vector<std::string>& texts, int size);
Vocabulary TrainVocabulary(const Manifest& corpus, int size);

// UTF-8 code points of `text` as separate strings.
std::vector<std::string> SplitCodePoints(const std::string& text);

}  // namespace avsr

#endif  // AVSR_TOKENIZER_BPE_H_
