#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace siaftp {

// Word-level vocabulary with five reserved ids. Token ids are assigned by
// first appearance in the training corpus, so they are stable for a fixed
// corpus ordering.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kMask = 2;
  static constexpr int kBos = 3;
  static constexpr int kEos = 4;
  static constexpr int kNumReserved = 5;
  static constexpr int kMaxLen = 32;

  Vocabulary() {
    for (const char* t : {"<pad>", "<unk>", "<mask>", "<bos>", "<eos>"})
      add_token(t);
  }

  static Vocabulary build(const std::vector<std::string>& corpus) {
    Vocabulary v;
    for (const auto& line : corpus) {
      std::istringstream is(line);
      std::string w;
      while (is >> w) v.add_token(w);
    }
    return v;
  }

  int add_token(const std::string& t) {
    auto it = token_to_id_.find(t);
    if (it != token_to_id_.end()) return it->second;
    int id = static_cast<int>(id_to_token_.size());
    token_to_id_.emplace(t, id);
    id_to_token_.push_back(t);
    return id;
  }

  int id(const std::string& t) const {
    auto it = token_to_id_.find(t);
    return it == token_to_id_.end() ? kUnk : it->second;
  }

  const std::string& token(int id) const { return id_to_token_.at(id); }
  int size() const { return static_cast<int>(id_to_token_.size()); }

  // Space-delimited lower-case words -> ids, padded/truncated to kMaxLen.
  std::vector<int> tokenize(const std::string& text) const {
    std::vector<int> ids;
    ids.reserve(kMaxLen);
    std::istringstream is(text);
    std::string w;
    while (is >> w && static_cast<int>(ids.size()) < kMaxLen)
      ids.push_back(id(w));
    while (static_cast<int>(ids.size()) < kMaxLen) ids.push_back(kPad);
    return ids;
  }

  std::string detokenize(const std::vector<int>& ids) const {
    std::string out;
    for (int i : ids) {
      if (i == kPad) continue;
      if (!out.empty()) out += ' ';
      out += token(i);
    }
    return out;
  }

  static int count_non_pad(const std::vector<int>& ids) {
    int n = 0;
    for (int i : ids)
      if (i != kPad) ++n;
    return n;
  }

  const std::map<std::string, int>& tokens() const { return token_to_id_; }

  // Rebuild from a {token: id} map (checkpoint loading).
  static Vocabulary restore(const std::map<std::string, int>& table) {
    Vocabulary v;
    std::vector<std::string> by_id(table.size());
    for (const auto& [tok, id] : table) by_id.at(static_cast<std::size_t>(id)) = tok;
    v.token_to_id_.clear();
    v.id_to_token_.clear();
    for (const auto& tok : by_id) v.add_token(tok);
    return v;
  }

 private:
  std::map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

}  // namespace siaftp
