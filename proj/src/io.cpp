#include "deprec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

namespace deprec {

namespace {

struct Token {
  std::string text;
  int line;
  int col;
};

std::vector<std::vector<Token>> tokenize(const std::string& text) {
  std::vector<std::vector<Token>> lines;
  int line_no = 1;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::vector<Token> tokens;
    int col = 1;
    while (i < text.size() && text[i] != '\n') {
      if (text[i] == ' ' || text[i] == '\t' || text[i] == '\r') {
        ++i;
        ++col;
        continue;
      }
      const int start_col = col;
      std::string word;
      while (i < text.size() && text[i] != '\n' && text[i] != ' ' &&
             text[i] != '\t' && text[i] != '\r') {
        word.push_back(text[i]);
        ++i;
        ++col;
      }
      tokens.push_back({std::move(word), line_no, start_col});
    }
    if (!tokens.empty() && tokens.front().text[0] != '#')
      lines.push_back(std::move(tokens));
    if (i >= text.size()) break;
    ++i;  // consume newline
    ++line_no;
  }
  return lines;
}

double parse_number(const Token& tok) {
  const std::string& s = tok.text;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    double num = 0.0, den = 0.0;
    auto r1 = std::from_chars(s.data(), s.data() + slash, num);
    auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != s.data() + slash ||
        r2.ec != std::errc{} || r2.ptr != s.data() + s.size() || den == 0.0)
      throw ParseError(tok.line, tok.col, "malformed fraction '" + s + "'");
    return num / den;
  }
  double value = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), value);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw ParseError(tok.line, tok.col, "malformed number '" + s + "'");
  return value;
}

std::string shortest_decimal(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

}  // namespace

Mdp parse_mdp(const std::string& text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty document");
  const auto& header = lines.front();
  if (header.size() != 1 || header[0].text != kMdpFormatVersion)
    throw ParseError(header[0].line, header[0].col,
                     "expected format version '" +
                         std::string(kMdpFormatVersion) + "'");

  Mdp mdp;
  bool have_states = false;
  std::set<std::pair<std::string, std::string>> actions_seen;
  std::set<std::tuple<int, int, int>> transitions_seen;
  std::set<std::pair<int, int>> rewards_seen;

  auto state_of = [&](const Token& tok) {
    const int s = mdp.state_index(tok.text);
    if (s < 0)
      throw ParseError(tok.line, tok.col, "unknown state '" + tok.text + "'");
    return s;
  };
  auto action_of = [&](int s, const Token& tok) {
    const int a = mdp.action_index(s, tok.text);
    if (a < 0)
      throw ParseError(tok.line, tok.col,
                       "unknown action '" + tok.text + "' at state " +
                           mdp.state_names[s]);
    return a;
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& toks = lines[li];
    const Token& kw = toks[0];
    if (kw.text == "title") {
      std::string t;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        if (k > 1) t += " ";
        t += toks[k].text;
      }
      mdp.title = t;
    } else if (kw.text == "states") {
      if (have_states)
        throw ParseError(kw.line, kw.col, "duplicate 'states' line");
      if (toks.size() < 2)
        throw ParseError(kw.line, kw.col, "'states' needs at least one name");
      for (std::size_t k = 1; k < toks.size(); ++k) {
        if (mdp.state_index(toks[k].text) >= 0)
          throw ParseError(toks[k].line, toks[k].col,
                           "duplicate state name '" + toks[k].text + "'");
        mdp.state_names.push_back(toks[k].text);
      }
      const int n = mdp.num_states();
      mdp.action_names.assign(n, {});
      mdp.transition.assign(n, {});
      mdp.reward.assign(n, {});
      have_states = true;
    } else if (kw.text == "actions") {
      if (!have_states)
        throw ParseError(kw.line, kw.col, "'actions' before 'states'");
      if (toks.size() < 3)
        throw ParseError(kw.line, kw.col,
                         "'actions' needs a state and at least one action");
      const int s = state_of(toks[1]);
      if (!mdp.action_names[s].empty())
        throw ParseError(toks[1].line, toks[1].col,
                         "duplicate 'actions' line for state " + toks[1].text);
      for (std::size_t k = 2; k < toks.size(); ++k) {
        if (mdp.action_index(s, toks[k].text) >= 0)
          throw ParseError(toks[k].line, toks[k].col,
                           "duplicate action name '" + toks[k].text + "'");
        mdp.action_names[s].push_back(toks[k].text);
        mdp.transition[s].push_back(
            std::vector<double>(mdp.num_states(), 0.0));
        mdp.reward[s].push_back(0.0);
      }
    } else if (kw.text == "transition") {
      if (!have_states)
        throw ParseError(kw.line, kw.col, "'transition' before 'states'");
      if (toks.size() != 5)
        throw ParseError(kw.line, kw.col,
                         "'transition' needs state action next probability");
      const int s = state_of(toks[1]);
      const int a = action_of(s, toks[2]);
      const int t = state_of(toks[3]);
      if (!transitions_seen.insert({s, a, t}).second)
        throw ParseError(toks[1].line, toks[1].col,
                         "duplicate transition entry");
      mdp.transition[s][a][t] = parse_number(toks[4]);
    } else if (kw.text == "reward") {
      if (!have_states)
        throw ParseError(kw.line, kw.col, "'reward' before 'states'");
      if (toks.size() != 4)
        throw ParseError(kw.line, kw.col, "'reward' needs state action value");
      const int s = state_of(toks[1]);
      const int a = action_of(s, toks[2]);
      if (!rewards_seen.insert({s, a}).second)
        throw ParseError(toks[1].line, toks[1].col, "duplicate reward entry");
      mdp.reward[s][a] = parse_number(toks[3]);
    } else {
      throw ParseError(kw.line, kw.col, "unknown field '" + kw.text + "'");
    }
  }

  if (!have_states) throw ParseError(1, 1, "missing 'states' line");

  auto report = validate_mdp(mdp);
  if (!report.empty()) throw ValidationError(std::move(report));

  // Rows already validated within 1e-9 of unit mass. Renormalize only rows
  // with visible drift; rows within rounding noise are kept verbatim so that
  // parse/serialize cycles are byte-stable.
  for (auto& per_state : mdp.transition)
    for (auto& row : per_state) {
      double sum = 0.0;
      for (double p : row) sum += p;
      if (std::abs(sum - 1.0) > 1e-12)
        for (double& p : row) p /= sum;
    }
  return mdp;
}

std::string serialize_mdp(const Mdp& mdp) {
  std::ostringstream out;
  out << kMdpFormatVersion << "\n";
  if (!mdp.title.empty()) out << "title " << mdp.title << "\n";
  out << "states";
  for (const auto& name : mdp.state_names) out << " " << name;
  out << "\n";
  for (int s = 0; s < mdp.num_states(); ++s) {
    out << "actions " << mdp.state_names[s];
    for (const auto& name : mdp.action_names[s]) out << " " << name;
    out << "\n";
  }
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a)
      for (int t = 0; t < mdp.num_states(); ++t) {
        const double p = mdp.transition[s][a][t];
        if (p == 0.0) continue;
        out << "transition " << mdp.state_names[s] << " "
            << mdp.action_names[s][a] << " " << mdp.state_names[t] << " "
            << shortest_decimal(p) << "\n";
      }
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const double r = mdp.reward[s][a];
      if (r == 0.0) continue;
      out << "reward " << mdp.state_names[s] << " " << mdp.action_names[s][a]
          << " " << shortest_decimal(r) << "\n";
    }
  return out.str();
}

std::string write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::vector<std::string>& state_names) {
  if (rows.empty()) throw std::invalid_argument("no sweep rows");
  for (const auto& [g, values] : rows)
    if (values.size() != state_names.size())
      throw std::invalid_argument("inconsistent sweep row width");
  std::ostringstream out;
  out << "gamma";
  for (const auto& name : state_names) out << "," << name;
  out << "\n";
  char buf[64];
  for (const auto& [g, values] : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g", g);
    out << buf;
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      out << "," << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string sweep_svg(const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& state_names) {
  if (rows.empty()) throw std::invalid_argument("no sweep rows");
  constexpr int kWidth = 800, kHeight = 520;
  constexpr int kLeft = 70, kRight = 160, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double xmin = rows.front().first, xmax = rows.back().first;
  double ymin = rows.front().second.front(), ymax = ymin;
  for (const auto& [g, values] : rows)
    for (double v : values) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) {
    return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double gx = xmin + (xmax - xmin) * i / 5.0;
    const double gy = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << px(gx) << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << px(gx) << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(gx) << "\" y=\"" << kTop + plot_h + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << gx << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(gy) << "\" x2=\""
        << kLeft << "\" y2=\"" << py(gy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 10 << "\" y=\"" << py(gy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << gy << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">gamma</text>\n";
  for (std::size_t s = 0; s < state_names.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(*kPalette))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [g, values] : rows)
      out << px(g) << "," << py(values[s]) << " ";
    out << "\"/>\n";
    const double ly = kTop + 16.0 * (s + 1);
    out << "<line x1=\"" << kLeft + plot_w + 10 << "\" y1=\"" << ly
        << "\" x2=\"" << kLeft + plot_w + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << state_names[s] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace deprec
