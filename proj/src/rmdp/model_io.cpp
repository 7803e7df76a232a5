// Copyright 2026 The rmdp-lp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rmdp/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rmdp/error.hpp"

namespace rmdp {
namespace {

using json = nlohmann::json;
using PathElement = std::variant<std::string, std::size_t>;
using Path = std::vector<PathElement>;

// Finds where the value at `path` starts in a syntactically valid document,
// so errors found after parsing can still name a line. Returns the deepest
// position reached if the path does not exist.
class Locator {
 public:
  explicit Locator(std::string_view text) : text_(text) {}

  std::size_t find(const Path& path) {
    pos_ = 0;
    ws();
    std::size_t found = pos_;
    for (const auto& elem : path) {
      if (!step(elem)) return found;
      found = pos_;
    }
    return found;
  }

 private:
  bool step(const PathElement& elem) {
    if (const auto* key = std::get_if<std::string>(&elem)) {
      if (peek() != '{') return false;
      ++pos_;
      ws();
      while (peek() == '"') {
        const std::string_view name = string_body();
        ws();
        if (peek() != ':') return false;
        ++pos_;
        ws();
        if (name == *key) return true;
        skip_value();
        ws();
        if (peek() == ',') {
          ++pos_;
          ws();
        }
      }
      return false;
    }
    const std::size_t index = std::get<std::size_t>(elem);
    if (peek() != '[') return false;
    ++pos_;
    ws();
    for (std::size_t i = 0; i < index; ++i) {
      if (peek() == ']') return false;
      skip_value();
      ws();
      if (peek() != ',') return false;
      ++pos_;
      ws();
    }
    return peek() != ']';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\r' ||
            text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  // Raw characters between the quotes; escapes are left undecoded.
  std::string_view string_body() {
    const std::size_t start = ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    const std::string_view body = text_.substr(start, pos_ - start);
    ++pos_;
    return body;
  }

  void skip_value() {
    const char c = peek();
    if (c == '"') {
      string_body();
    } else if (c == '{' || c == '[') {
      int depth = 0;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (d == '"') {
          string_body();
          continue;
        }
        if (d == '{' || d == '[') ++depth;
        if (d == '}' || d == ']') --depth;
        ++pos_;
        if (depth == 0) return;
      }
    } else {
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
             text_[pos_] != ']' && text_[pos_] != ' ' && text_[pos_] != '\n' &&
             text_[pos_] != '\r' && text_[pos_] != '\t') {
        ++pos_;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string path_string(const Path& path) {
  std::string out;
  for (const auto& e : path) {
    if (const auto* key = std::get_if<std::string>(&e)) {
      if (!out.empty()) out += '.';
      out += *key;
    } else {
      out += '[' + std::to_string(std::get<std::size_t>(e)) + ']';
    }
  }
  return out;
}

class Reader {
 public:
  Reader(std::string_view text, std::string_view source)
      : text_(text), source_(source), locator_(text) {}

  [[noreturn]] void fail(ErrorCode code, const Path& path,
                         const std::string& what) {
    const TextPosition at = position_of(text_, locator_.find(path));
    std::ostringstream msg;
    msg << source_ << ':' << at.line << ':' << at.column << ": " << what;
    throw Error(code, msg.str());
  }

  const json& field(const json& obj, const Path& path, const char* name) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
      fail(ErrorCode::ParseError, path,
           std::string("missing field \"") + name + "\"");
    }
    return *it;
  }

  double number(const json& v, const Path& path) {
    if (!v.is_number()) {
      fail(ErrorCode::ParseError, path, path_string(path) + ": expected a number");
    }
    return v.get<double>();
  }

  std::size_t count(const json& v, const Path& path) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
      fail(ErrorCode::ParseError, path,
           path_string(path) + ": expected a positive integer");
    }
    return static_cast<std::size_t>(v.get<std::uint64_t>());
  }

  // Reads nested arrays of the given shape into `out`, row-major.
  void tensor(const json& v, Path path, const std::vector<std::size_t>& shape,
              std::size_t depth, std::vector<double>& out) {
    if (depth == shape.size()) {
      out.push_back(number(v, path));
      return;
    }
    if (!v.is_array()) {
      fail(ErrorCode::ParseError, path, path_string(path) + ": expected an array");
    }
    if (v.size() != shape[depth]) {
      fail(ErrorCode::DimensionMismatch, path,
           path_string(path) + ": expected " + std::to_string(shape[depth]) +
               " entries, found " + std::to_string(v.size()));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      path.emplace_back(i);
      tensor(v[i], path, shape, depth + 1, out);
      path.pop_back();
    }
  }

  // Scalar (broadcast to n entries) or an array with the given shape.
  std::vector<double> radii(const json& v, const Path& path,
                            const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (v.is_number()) return std::vector<double>(n, v.get<double>());
    std::vector<double> out;
    out.reserve(n);
    tensor(v, path, shape, 0, out);
    return out;
  }

  ModelFile read() {
    json doc;
    try {
      doc = json::parse(text_);
    } catch (const json::parse_error& e) {
      const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
      const TextPosition at = position_of(text_, byte);
      std::string what = e.what();
      if (const auto p = what.find("parse error"); p != std::string::npos) {
        what = what.substr(p);
      }
      std::ostringstream msg;
      msg << source_ << ':' << at.line << ':' << at.column << ": " << what;
      throw Error(ErrorCode::ParseError, msg.str());
    }
    if (!doc.is_object()) {
      fail(ErrorCode::ParseError, {}, "top level must be an object");
    }

    MdpData d;
    d.num_states = count(field(doc, {}, "num_states"), {"num_states"});
    d.num_actions = count(field(doc, {}, "num_actions"), {"num_actions"});
    d.discount = number(field(doc, {}, "discount"), {"discount"});
    const std::size_t S = d.num_states, A = d.num_actions;
    tensor(field(doc, {}, "kernel"), {"kernel"}, {S, A, S}, 0, d.kernel);
    tensor(field(doc, {}, "reward"), {"reward"}, {S, A}, 0, d.reward);
    if (doc.contains("initial_dist")) {
      tensor(doc["initial_dist"], {"initial_dist"}, {S}, 0, d.initial_dist);
    } else {
      d.initial_dist.assign(S, 1.0 / static_cast<double>(S));
    }

    const ValidationReport report = validate_mdp(d);
    if (!report.ok()) {
      const ValidationIssue& issue = report.issues.front();
      Path where;
      if (issue.message.rfind("kernel[", 0) == 0) {
        where = {"kernel", issue.state, issue.action};
      } else if (issue.message.rfind("reward[", 0) == 0) {
        where = {"reward", issue.state, issue.action};
      } else if (issue.message.rfind("discount", 0) == 0) {
        where = {"discount"};
      } else if (issue.message.rfind("initial_dist", 0) == 0) {
        where = {"initial_dist"};
      }
      std::string what = issue.message;
      if (report.issues.size() > 1) {
        what += " (and " + std::to_string(report.issues.size() - 1) +
                " more issue" + (report.issues.size() > 2 ? "s" : "") + ")";
      }
      fail(issue.code, where, what);
    }

    ModelFile out{TabularMDP(std::move(d)), std::nullopt};
    if (doc.contains("uncertainty")) out.uncertainty = uncertainty(doc["uncertainty"], S, A);
    return out;
  }

  UncertaintySpec uncertainty(const json& u, std::size_t S, std::size_t A) {
    const Path base{"uncertainty"};
    if (!u.is_object()) fail(ErrorCode::ParseError, base, "uncertainty must be an object");
    const json& mode_v = field(u, base, "mode");
    if (!mode_v.is_string()) {
      fail(ErrorCode::ParseError, {"uncertainty", "mode"}, "mode must be a string");
    }
    const std::string mode_s = mode_v.get<std::string>();
    Rectangularity mode;
    if (mode_s == "sa" || mode_s == "sa_rect") mode = Rectangularity::SA;
    else if (mode_s == "s" || mode_s == "s_rect") mode = Rectangularity::S;
    else fail(ErrorCode::ParseError, {"uncertainty", "mode"},
              "mode must be \"sa\" or \"s\", got \"" + mode_s + "\"");

    const json& p_v = field(u, base, "p");
    double p = 0.0;
    try {
      p = p_v.is_string() ? parse_exponent(p_v.get<std::string>())
                          : number(p_v, {"uncertainty", "p"});
      if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      fail(ErrorCode::InvalidArgument, {"uncertainty", "p"}, e.what());
    }

    const std::vector<std::size_t> shape =
        mode == Rectangularity::SA ? std::vector<std::size_t>{S, A}
                                   : std::vector<std::size_t>{S};
    const std::vector<double> beta =
        radii(field(u, base, "beta"), {"uncertainty", "beta"}, shape);
    std::vector<double> alpha;
    if (u.contains("alpha")) {
      alpha = radii(u["alpha"], {"uncertainty", "alpha"}, shape);
    }
    try {
      return mode == Rectangularity::SA
                 ? UncertaintySpec::sa_rect(p, beta, alpha, S, A)
                 : UncertaintySpec::s_rect(p, beta, alpha, S, A);
    } catch (const Error& e) {
      const char* key = e.code() == ErrorCode::NegativeBeta ? "beta" : "alpha";
      fail(e.code(), {"uncertainty", key}, e.what());
    }
  }

 private:
  std::string_view text_;
  std::string_view source_;
  Locator locator_;
};

json nested(const std::vector<double>& flat, std::size_t rows,
            std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    out.push_back(std::vector<double>(
        flat.begin() + static_cast<std::ptrdiff_t>(r * cols),
        flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)));
  }
  return out;
}

json exponent_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

}  // namespace

TextPosition position_of(std::string_view text, std::size_t offset) {
  TextPosition at;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++at.line;
      at.column = 1;
    } else {
      ++at.column;
    }
  }
  return at;
}

double parse_exponent(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "infinity" || text == "INF") {
    return kInfinity;
  }
  double p = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(p >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "exponent must be a number >= 1 or \"inf\", got \"" +
                    std::string(text) + "\"");
  }
  return p;
}

std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  return json(p).dump();
}

ModelFile parse_model(std::string_view text, std::string_view source) {
  return Reader(text, source).read();
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return parse_model(buf.str(), path);
}

std::string model_to_json(const TabularMDP& m, const UncertaintySpec* u) {
  const std::size_t S = m.num_states(), A = m.num_actions();
  json doc;
  doc["num_states"] = S;
  doc["num_actions"] = A;
  doc["discount"] = m.discount();
  json kernel = json::array();
  for (std::size_t s = 0; s < S; ++s) {
    json per_action = json::array();
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = m.row(s, a);
      per_action.push_back(std::vector<double>(row.begin(), row.end()));
    }
    kernel.push_back(std::move(per_action));
  }
  doc["kernel"] = std::move(kernel);
  doc["reward"] = nested(m.data().reward, S, A);
  doc["initial_dist"] = m.data().initial_dist;
  if (u != nullptr) {
    json unc;
    unc["mode"] = to_string(u->mode());
    unc["p"] = exponent_json(u->p());
    if (u->mode() == Rectangularity::SA) {
      unc["beta"] = nested(u->betas(), S, A);
      unc["alpha"] = nested(u->alphas(), S, A);
    } else {
      unc["beta"] = u->betas();
      unc["alpha"] = u->alphas();
    }
    doc["uncertainty"] = std::move(unc);
  }
  return doc.dump(2) + "\n";
}

std::string solution_to_json(const SolveResult& r, const UncertaintySpec& u) {
  const std::size_t S = r.policy.num_states(), A = r.policy.num_actions();
  json doc;
  doc["mode"] = to_string(u.mode());
  doc["p"] = exponent_json(u.p());
  doc["V"] = r.V;
  doc["Q"] = nested(r.Q, S, A);
  doc["policy"] = nested(r.policy.probs(), S, A);
  doc["iterations"] = r.iterations;
  doc["residual"] = r.residual;
  doc["eps_opt_bound"] = r.eps_opt_bound;
  return doc.dump(2) + "\n";
}

}  // namespace rmdp
