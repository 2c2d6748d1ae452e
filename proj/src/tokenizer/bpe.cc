// src/tokenizer/bpe.cc

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

#include "avsr/tokenizer/bpe.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "avsr/base/error.h"

namespace avsr {

namespace {

const char* const kReservedPieces[kNumReserved] = {"<blank>", "<unk>", "<sos>", "<eos>"};

std::string ReplaceSpaces(const std::string& text) {
  std::string out;
  out.reserve(text.size() + 8);
  for (char c : text) {
    if (c == ' ') {
      out += kSpaceMarker;
    } else {
      out += c;
    }
  }
  return out;
}

std::size_t CodePointLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: treat as its own symbol
}

}  // namespace

std::vector<std::string> SplitCodePoints(const std::string& text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t n = std::min(CodePointLength(text[i]), text.size() - i);
    out.push_back(text.substr(i, n));
    i += n;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> pieces) : pieces_(std::move(pieces)) {
  AVSR_CHECK(pieces_.size() >= kNumReserved + 1, "vocabulary needs at least ",
             kNumReserved + 1, " pieces, got ", pieces_.size());
  for (int i = 0; i < kNumReserved; ++i) {
    AVSR_CHECK(pieces_[i] == kReservedPieces[i], "piece ", i, " must be ",
               kReservedPieces[i], ", got '", pieces_[i], "'");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    AVSR_CHECK(!pieces_[i].empty(), "empty piece at id ", i);
    AVSR_CHECK(index_.emplace(pieces_[i], static_cast<int>(i)).second,
               "duplicate piece '", pieces_[i], "'");
    if (i >= kNumReserved) max_piece_bytes_ = std::max(max_piece_bytes_, pieces_[i].size());
  }
}

const std::string& Vocabulary::piece(int id) const {
  if (id < 0 || id >= size()) Fail("token id ", id, " outside vocabulary of ", size());
  return pieces_[id];
}

int Vocabulary::Find(const std::string& piece) const {
  auto it = index_.find(piece);
  return it == index_.end() ? -1 : it->second;
}

TokenSequence Vocabulary::Encode(const std::string& text) const {
  AVSR_CHECK(!text.empty(), "cannot encode empty text");
  const std::string s = ReplaceSpaces(text);
  TokenSequence ids;
  std::size_t i = 0;
  while (i < s.size()) {
    int found = -1;
    std::size_t found_len = 0;
    // Walk candidate lengths on code-point boundaries, longest first.
    std::vector<std::size_t> ends;
    for (std::size_t j = i; j < s.size() && j - i < max_piece_bytes_;) {
      j += std::min(CodePointLength(s[j]), s.size() - j);
      if (j - i <= max_piece_bytes_) ends.push_back(j);
    }
    for (auto it = ends.rbegin(); it != ends.rend(); ++it) {
      const int id = Find(s.substr(i, *it - i));
      if (id >= kNumReserved) {
        found = id;
        found_len = *it - i;
        break;
      }
    }
    if (found < 0) {
      found = kUnkId;
      found_len = std::min(CodePointLength(s[i]), s.size() - i);
    }
    ids.push_back(found);
    i += found_len;
  }
  return ids;
}

std::string Vocabulary::Decode(const TokenSequence& ids) const {
  std::string s;
  for (int id : ids) {
    const std::string& p = piece(id);
    if (id == kUnkId) {
      s += kReplacementGlyph;
    } else if (id < kNumReserved) {
      Fail("reserved id ", id, " cannot be decoded to text");
    } else {
      s += p;
    }
  }
  std::string out;
  const std::string marker = kSpaceMarker;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, marker.size(), marker) == 0) {
      out += ' ';
      i += marker.size();
    } else {
      out += s[i++];
    }
  }
  return out;
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) Fail("cannot open for writing: ", path);
  for (const auto& p : pieces_) os << p << '\n';
  if (!os) Fail("write failed: ", path);
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open vocabulary: ", path);
  std::vector<std::string> pieces;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pieces.push_back(line);
  }
  return Vocabulary(std::move(pieces));
}

Vocabulary TrainVocabulary(const std::vector<std::string>& texts, int size) {
  AVSR_CHECK(!texts.empty(), "cannot train a vocabulary on an empty corpus");
  // Segment each text before every boundary marker and count segment types.
  std::map<std::string, long long> segment_counts;
  std::set<std::string> alphabet;
  for (const auto& text : texts) {
    const auto cps = SplitCodePoints(ReplaceSpaces(text));
    std::string seg;
    for (const auto& cp : cps) {
      alphabet.insert(cp);
      if (cp == kSpaceMarker && !seg.empty()) {
        ++segment_counts[seg];
        seg.clear();
      }
      seg += cp;
    }
    if (!seg.empty()) ++segment_counts[seg];
  }
  AVSR_CHECK(!alphabet.empty(), "cannot train a vocabulary on an empty corpus");
  const int min_size = static_cast<int>(alphabet.size()) + kNumReserved;
  AVSR_CHECK(size >= min_size, "vocabulary size ", size, " below alphabet size + ",
             kNumReserved, " = ", min_size);

  std::vector<std::string> pieces(kReservedPieces, kReservedPieces + kNumReserved);
  std::set<std::string> have;
  for (const auto& c : alphabet) {
    pieces.push_back(c);
    have.insert(c);
  }

  struct Segment {
    std::vector<std::string> symbols;
    long long count;
  };
  std::vector<Segment> segments;
  for (const auto& [seg, n] : segment_counts) segments.push_back({SplitCodePoints(seg), n});

  while (static_cast<int>(pieces.size()) < size) {
    std::map<std::pair<std::string, std::string>, long long> pair_counts;
    for (const auto& s : segments) {
      for (std::size_t i = 0; i + 1 < s.symbols.size(); ++i) {
        pair_counts[{s.symbols[i], s.symbols[i + 1]}] += s.count;
      }
    }
    if (pair_counts.empty()) {
      Fail("vocabulary size ", size, " unreachable: corpus supports at most ", pieces.size());
    }
    // std::map iterates in lexicographic pair order, so the first maximum wins.
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto [left, right] = best->first;
    const std::string merged = left + right;
    for (auto& s : segments) {
      std::vector<std::string> out;
      out.reserve(s.symbols.size());
      for (std::size_t i = 0; i < s.symbols.size(); ++i) {
        if (i + 1 < s.symbols.size() && s.symbols[i] == left && s.symbols[i + 1] == right) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(s.symbols[i]);
        }
      }
      s.symbols = std::move(out);
    }
    if (have.insert(merged).second) pieces.push_back(merged);
  }
  return Vocabulary(std::move(pieces));
}

Vocabulary TrainVocabulary(const Manifest& corpus, int size) {
  std::vector<std::string> texts;
  for (const auto& r : corpus.records) {
    if (!r.transcript.empty()) texts.push_back(r.transcript);
  }
  return TrainVocabulary(texts, size);
}

}  // namespace avsr
