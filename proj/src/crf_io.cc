#include <charconv>
#include <iterator>
#include <sstream>

#include "labner/crf.h"
#include "labner/error.h"
#include "labner/text.h"

namespace labner {
namespace {

constexpr std::string_view kMagic = "labner-crf-model";

std::string FormatHex(double value) {
  char buffer[64];
  auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::hex);
  return std::string(buffer, end);
}

class LineReader {
 public:
  explicit LineReader(std::string_view body) : body_(body) {}

  std::string_view Next() {
    if (pos_ >= body_.size()) throw DataError("model file is truncated");
    size_t end = body_.find('\n', pos_);
    if (end == std::string_view::npos) end = body_.size();
    std::string_view line = body_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    return line;
  }

  // Reads "<keyword> <count>".
  int Section(std::string_view keyword) {
    std::string_view line = Next();
    auto fields = SplitWhitespace(line);
    int count = -1;
    if (fields.size() == 2 && fields[0] == keyword) {
      auto [p, ec] = std::from_chars(fields[1].data(),
                                     fields[1].data() + fields[1].size(), count);
      if (ec != std::errc() || p != fields[1].data() + fields[1].size()) {
        count = -1;
      }
    }
    if (count < 0) Fail("expected '" + std::string(keyword) + " <count>'");
    return count;
  }

  [[noreturn]] void Fail(const std::string &message) const {
    throw DataError("model file line " + std::to_string(line_) + ": " +
                    message);
  }

 private:
  std::string_view body_;
  size_t pos_ = 0;
  int line_ = 0;
};

int ParseInt(LineReader &reader, std::string_view text) {
  int value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size()) {
    reader.Fail("bad integer '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void SaveModel(const CrfModel &model, std::ostream &out) {
  std::ostringstream body;
  body << kMagic << '\n' << "version " << kModelFormatVersion << '\n';

  const auto &types = model.labels().types();
  body << "labels " << types.size() << '\n';
  for (const std::string &type : types) body << type << '\n';

  std::ostringstream templates;
  WriteTemplates(model.extractor().templates(), templates);
  const std::string template_text = templates.str();
  body << "templates "
       << std::count(template_text.begin(), template_text.end(), '\n') << '\n'
       << template_text;

  const auto &gazetteers = model.extractor().gazetteers();
  body << "gazetteers " << gazetteers.size() << '\n';
  for (const Gazetteer &gazetteer : gazetteers) {
    body << gazetteer.name() << '\n' << "entries " << gazetteer.size() << '\n';
    for (const std::string &entry : gazetteer.Entries()) body << entry << '\n';
  }

  // "<label,label,...>\t<feature>": the name takes the rest of the line.
  const auto &names = model.dictionary().names();
  body << "features " << names.size() << '\n';
  for (int f = 0; f < model.num_features(); ++f) {
    for (int k = model.EmissionBegin(f); k < model.EmissionBegin(f + 1); ++k) {
      if (k > model.EmissionBegin(f)) body << ',';
      body << model.EmissionLabel(k);
    }
    body << '\t' << names[f] << '\n';
  }

  body << "weights " << model.num_params() << '\n';
  for (double w : model.weights()) body << FormatHex(w) << '\n';

  const std::string text = body.str();
  out << text << "checksum " << Hex64(Fnv1a64(text)) << '\n';
  if (!out) throw DataError("failed to write model");
}

CrfModel LoadModel(std::istream &in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  if (text.rfind(kMagic, 0) != 0) throw DataError("not a labner CRF model");

  // The checksum line closes the file.
  std::string_view all = text;
  while (!all.empty() && all.back() == '\n') all.remove_suffix(1);
  const size_t last = all.rfind('\n');
  if (last == std::string_view::npos ||
      all.substr(last + 1).rfind("checksum ", 0) != 0) {
    throw DataError("model file is truncated (no checksum line)");
  }
  std::string_view body = all.substr(0, last + 1);
  std::string_view stored = Trim(all.substr(last + 1 + 9));
  if (stored != Hex64(Fnv1a64(body))) {
    throw DataError("model file checksum mismatch");
  }

  LineReader reader(body);
  reader.Next();
  const int version = reader.Section("version");
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " +
                    std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }

  LabelSet labels;
  for (int i = reader.Section("labels"); i > 0; --i) {
    labels.Add(std::string(reader.Next()));
  }

  std::string template_text;
  for (int i = reader.Section("templates"); i > 0; --i) {
    template_text.append(reader.Next());
    template_text.push_back('\n');
  }
  std::istringstream template_stream(template_text);
  std::vector<FeatureTemplate> templates = ReadTemplates(template_stream);

  std::vector<Gazetteer> gazetteers;
  for (int i = reader.Section("gazetteers"); i > 0; --i) {
    std::string name(reader.Next());
    std::vector<std::string> entries;
    for (int j = reader.Section("entries"); j > 0; --j) {
      entries.emplace_back(reader.Next());
    }
    gazetteers.emplace_back(std::move(name), entries);
  }

  FeatureDictionary dictionary;
  std::vector<std::vector<int>> feature_labels;
  for (int i = reader.Section("features"); i > 0; --i) {
    std::string_view line = reader.Next();
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) reader.Fail("missing tab");
    std::vector<int> pair_labels;
    if (tab > 0) {
      for (const std::string &field : Split(line.substr(0, tab), ',')) {
        int label = ParseInt(reader, field);
        if (label < 0 || label >= labels.num_tags()) {
          reader.Fail("label index out of range");
        }
        pair_labels.push_back(label);
      }
    }
    std::string name(line.substr(tab + 1));
    if (dictionary.Lookup(name) >= 0) reader.Fail("duplicate feature");
    dictionary.Add(name);
    feature_labels.push_back(std::move(pair_labels));
  }

  CrfModel model(std::move(labels),
                 FeatureExtractor(std::move(templates), std::move(gazetteers)),
                 std::move(dictionary), feature_labels);
  const int num_weights = reader.Section("weights");
  if (num_weights != model.num_params()) {
    reader.Fail("expected " + std::to_string(model.num_params()) +
                " weights, found " + std::to_string(num_weights));
  }
  std::vector<double> weights(num_weights);
  for (double &w : weights) {
    std::string_view line = reader.Next();
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), w,
                                   std::chars_format::hex);
    if (ec != std::errc() || p != line.data() + line.size()) {
      reader.Fail("bad weight '" + std::string(line) + "'");
    }
  }
  model.set_weights(std::move(weights));
  return model;
}

}  // namespace labner
