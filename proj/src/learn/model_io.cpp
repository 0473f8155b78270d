#include "notimind/learn/model_io.hpp"

#include <cstddef>

#include "notimind/error.hpp"
#include "notimind/text.hpp"

namespace notimind::learn {

namespace {

constexpr std::string_view kMagic = "notimind-model 1";

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

void put_vector(std::string& out, std::string_view key, const Eigen::VectorXd& v) {
  out += std::string(key) + " " + std::to_string(v.size());
  if (v.size()) out += " " + join(v);
  out += "\n";
}

void put_matrix(std::string& out, std::string_view key, const Eigen::MatrixXd& m) {
  out += std::string(key) + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) out += join(m.row(r).transpose()) + "\n";
}

class Reader {
 public:
  explicit Reader(std::string_view text) : lines_(split(text, '\n')) {
    while (!lines_.empty() && trim(lines_.back()).empty()) lines_.pop_back();
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::kBadFormat, "model line " + std::to_string(pos_) + ": " + why);
  }

  std::vector<std::string> tokens() {
    if (pos_ >= lines_.size()) {
      ++pos_;
      fail("unexpected end of file");
    }
    std::vector<std::string> out;
    for (std::string_view t : split(lines_[pos_++], ' ')) {
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  std::vector<std::string> keyed(std::string_view key) {
    std::vector<std::string> t = tokens();
    if (t.empty() || t[0] != key) fail("expected '" + std::string(key) + "'");
    t.erase(t.begin());
    return t;
  }

  double number(const std::string& s) const {
    const auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "'");
    return *v;
  }

  long long integer(const std::string& s) const {
    const auto v = parse_int(s);
    if (!v || *v < 0) fail("bad count '" + s + "'");
    return *v;
  }

  Eigen::VectorXd numbers(std::span<const std::string> t, std::size_t expected) const {
    if (t.size() != expected) fail("expected " + std::to_string(expected) + " values, got " + std::to_string(t.size()));
    Eigen::VectorXd v(static_cast<Eigen::Index>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(t[i]);
    return v;
  }

  Eigen::VectorXd vector(std::string_view key) {
    const std::vector<std::string> t = keyed(key);
    if (t.empty()) fail("missing length");
    const auto n = static_cast<std::size_t>(integer(t[0]));
    return numbers(std::span(t).subspan(1), n);
  }

  Eigen::MatrixXd matrix(std::string_view key) {
    const std::vector<std::string> t = keyed(key);
    if (t.size() != 2) fail("expected rows and columns");
    const auto rows = integer(t[0]);
    const auto cols = static_cast<std::size_t>(integer(t[1]));
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(cols));
    for (long long r = 0; r < rows; ++r) m.row(r) = numbers(tokens(), cols).transpose();
    return m;
  }

  bool done() const { return pos_ >= lines_.size(); }
  std::string_view first() const { return lines_.empty() ? std::string_view{} : lines_[0]; }
  void skip() { ++pos_; }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<int> SavedModel::predict_raw(const Eigen::MatrixXd& rows) const {
  return predict(model, normalization.apply(rows));
}

std::string write_model(const SavedModel& saved) {
  std::string out(kMagic);
  out += "\nkind " + std::string(to_string(kind_of(saved.model))) + "\ncolumns " + std::to_string(saved.columns.size());
  for (const std::string& c : saved.columns) out += " " + c;
  out += "\n";
  put_vector(out, "mean", saved.normalization.mean);
  put_vector(out, "scale", saved.normalization.scale);
  if (const auto* m = std::get_if<LogisticModel>(&saved.model)) {
    put_matrix(out, "weights", m->weights);
    put_vector(out, "bias", m->bias);
  } else if (const auto* m = std::get_if<MlpModel>(&saved.model)) {
    put_matrix(out, "w1", m->w1);
    put_vector(out, "b1", m->b1);
    put_matrix(out, "w2", m->w2);
    put_vector(out, "b2", m->b2);
  } else if (const auto* m = std::get_if<SvmModel>(&saved.model)) {
    out += "gamma " + format_double(m->gamma) + "\nc " + format_double(m->c) + "\nfeatures " +
           std::to_string(m->features) + "\nconstant_class " +
           (m->constant_class ? std::to_string(*m->constant_class) : std::string("none")) + "\nmachines " +
           std::to_string(m->machines.size()) + "\n";
    for (const BinarySvm& b : m->machines) {
      out += "machine " + std::to_string(b.positive) + " " + std::to_string(b.negative) + " " + format_double(b.bias) +
             "\n";
      put_vector(out, "coefficients", b.coefficients);
      put_matrix(out, "support_vectors", b.support_vectors);
    }
  } else {
    const auto& maj = std::get<MajorityModel>(saved.model);
    out += "label " + std::to_string(maj.label) + "\nfeatures " + std::to_string(maj.features) + "\n";
  }
  return out;
}

SavedModel read_model(std::string_view text) {
  Reader in(text);
  if (in.first() != kMagic) in.fail("missing '" + std::string(kMagic) + "' header");
  in.skip();
  SavedModel saved;
  const std::vector<std::string> kind_tokens = in.keyed("kind");
  if (kind_tokens.size() != 1) in.fail("expected one kind");
  const auto kind = parse_classifier_kind(kind_tokens[0]);
  if (!kind) in.fail("unknown kind '" + kind_tokens[0] + "'");
  const std::vector<std::string> cols = in.keyed("columns");
  if (cols.empty() || static_cast<std::size_t>(in.integer(cols[0])) != cols.size() - 1) in.fail("bad column list");
  saved.columns.assign(cols.begin() + 1, cols.end());
  saved.normalization.mean = in.vector("mean");
  saved.normalization.scale = in.vector("scale");
  const auto d = static_cast<Eigen::Index>(saved.columns.size());
  if (saved.normalization.mean.size() != d || saved.normalization.scale.size() != d) {
    in.fail("normalization does not match the column count");
  }
  const auto single = [&](std::string_view key) {
    const std::vector<std::string> t = in.keyed(key);
    if (t.size() != 1) in.fail("expected one value for '" + std::string(key) + "'");
    return t[0];
  };
  switch (*kind) {
    case ClassifierKind::kLr: {
      LogisticModel m;
      m.weights = in.matrix("weights");
      m.bias = in.vector("bias");
      if (m.weights.rows() != kClassCount || m.weights.cols() != d || m.bias.size() != kClassCount) {
        in.fail("logistic shapes do not match");
      }
      saved.model = m;
      break;
    }
    case ClassifierKind::kAnn: {
      MlpModel m;
      m.w1 = in.matrix("w1");
      m.b1 = in.vector("b1");
      m.w2 = in.matrix("w2");
      m.b2 = in.vector("b2");
      if (m.w1.cols() != d || m.b1.size() != m.w1.rows() || m.w2.rows() != kClassCount || m.w2.cols() != m.w1.rows() ||
          m.b2.size() != kClassCount) {
        in.fail("network shapes do not match");
      }
      saved.model = m;
      break;
    }
    case ClassifierKind::kSvm: {
      SvmModel m;
      m.gamma = in.number(single("gamma"));
      m.c = in.number(single("c"));
      m.features = static_cast<std::size_t>(in.integer(single("features")));
      const std::string constant = single("constant_class");
      if (constant != "none") {
        const auto v = parse_int(constant);
        if (!v || *v < -1 || *v > 1) in.fail("bad constant class");
        m.constant_class = static_cast<int>(*v);
      }
      const auto machines = in.integer(single("machines"));
      for (long long i = 0; i < machines; ++i) {
        const std::vector<std::string> t = in.keyed("machine");
        if (t.size() != 3) in.fail("expected positive, negative and bias");
        BinarySvm b;
        b.positive = static_cast<int>(in.integer(t[0]));
        b.negative = static_cast<int>(in.integer(t[1]));
        if (b.positive >= kClassCount || b.negative >= kClassCount) in.fail("class index out of range");
        b.bias = in.number(t[2]);
        b.coefficients = in.vector("coefficients");
        b.support_vectors = in.matrix("support_vectors");
        if (b.support_vectors.rows() != b.coefficients.size() ||
            b.support_vectors.cols() != static_cast<Eigen::Index>(m.features)) {
          in.fail("support vector shapes do not match");
        }
        m.machines.push_back(std::move(b));
      }
      if (m.features != static_cast<std::size_t>(d)) in.fail("feature count does not match the columns");
      saved.model = std::move(m);
      break;
    }
    case ClassifierKind::kMajority: {
      MajorityModel m;
      const auto label = parse_int(single("label"));
      if (!label || *label < -1 || *label > 1) in.fail("bad label");
      m.label = static_cast<int>(*label);
      m.features = static_cast<std::size_t>(in.integer(single("features")));
      if (m.features != static_cast<std::size_t>(d)) in.fail("feature count does not match the columns");
      saved.model = m;
      break;
    }
  }
  if (!in.done()) in.fail("trailing content");
  return saved;
}

}  // namespace notimind::learn
