// harness/report.cc

// Copyright 2026  The avfront Authors

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

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "avfront/harness.h"

namespace avfront {

namespace {

std::string Fixed(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string SnrLabel(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g dB", snr);
  return buf;
}

double ParseNumber(const std::string &s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  Require(used == s.size() && !s.empty(), ErrorCode::kBadFile, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::map<std::string, std::map<double, CellStats>> Summarize(
    const std::vector<ReportRow> &rows) {
  std::map<std::string, std::map<double, CellStats>> out;
  for (const auto &r : rows) {
    CellStats &c = out[r.method][r.snr_db];
    c.si_sdr += r.si_sdr;
    c.stoi += r.stoi;
    ++c.count;
  }
  for (auto &[m, cells] : out)
    for (auto &[snr, c] : cells) {
      c.si_sdr /= c.count;
      c.stoi /= c.count;
    }
  return out;
}

std::string ReportCsv(const std::vector<ReportRow> &rows, const std::string &config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << "\n";
  os << "utterance,snr_db,method,si_sdr,stoi\n";
  for (const auto &r : rows)
    os << r.utterance << "," << Fixed(r.snr_db, 1) << "," << r.method << ","
       << Fixed(r.si_sdr, 6) << "," << Fixed(r.stoi, 6) << "\n";
  return os.str();
}

std::vector<ReportRow> ParseReportCsv(const std::string &text, std::string *config_hash) {
  std::istringstream is(text);
  std::string line;
  std::vector<ReportRow> rows;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (config_hash && line.compare(0, key.size(), key) == 0)
        *config_hash = line.substr(key.size());
      continue;
    }
    if (!header) {
      Require(line == "utterance,snr_db,method,si_sdr,stoi", ErrorCode::kBadFile,
              "unexpected report header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    Require(f.size() == 5, ErrorCode::kBadFile, "report row needs 5 fields: '" + line + "'");
    rows.push_back({f[0], ParseNumber(f[1]), f[2], ParseNumber(f[3]), ParseNumber(f[4])});
  }
  Require(header, ErrorCode::kBadFile, "report has no header");
  return rows;
}

std::string FormatTables(const std::vector<ReportRow> &rows,
                         const std::vector<std::string> &methods,
                         const std::vector<double> &snrs, const std::string &config_hash) {
  const auto summary = Summarize(rows);
  auto cell = [&](const std::string &m, double snr) -> const CellStats * {
    auto it = summary.find(m);
    if (it == summary.end()) return nullptr;
    auto jt = it->second.find(snr);
    return jt == it->second.end() ? nullptr : &jt->second;
  };

  std::ostringstream os;
  os << "# config_hash=" << config_hash << "\n";
  os << "# utterances per cell:";
  for (const auto &m : methods) {
    int lo = 1 << 30, hi = 0;
    for (double s : snrs) {
      const CellStats *c = cell(m, s);
      const int n = c ? c->count : 0;
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    os << " " << m << "=" << lo;
    if (hi != lo) os << ".." << hi;
  }
  os << "\n\n";

  auto header = [&](const std::string &title) {
    os << title << "\n| Method |";
    for (double s : snrs) os << " " << SnrLabel(s) << " |";
    os << "\n|---|";
    for (size_t i = 0; i < snrs.size(); ++i) os << "---|";
    os << "\n";
  };
  auto table = [&](const std::string &title, auto value, int digits) {
    header(title);
    for (const auto &m : methods) {
      os << "| " << m << " |";
      for (double s : snrs) {
        const CellStats *c = cell(m, s);
        os << " " << (c ? Fixed(value(*c), digits) : std::string("n/a")) << " |";
      }
      os << "\n";
    }
    os << "\n";
  };

  table("Mean STOI", [](const CellStats &c) { return c.stoi; }, 3);
  header("Mean PESQ");
  for (const auto &m : methods) {
    os << "| " << m << " |";
    for (size_t i = 0; i < snrs.size(); ++i) os << " - |";
    os << "\n";
  }
  os << "\n";
  table("Mean SI-SDR (dB)", [](const CellStats &c) { return c.si_sdr; }, 2);

  auto improvement = [&](const std::string &title, auto value, int digits) {
    header(title);
    for (const auto &m : methods) {
      if (m == kMethodNoisy) continue;
      os << "| " << m << " |";
      for (double s : snrs) {
        const CellStats *c = cell(m, s), *n = cell(kMethodNoisy, s);
        os << " " << (c && n ? Fixed(value(*c) - value(*n), digits) : std::string("n/a"))
           << " |";
      }
      os << "\n";
    }
    os << "\n";
  };
  improvement("SI-SDR improvement over noisy input (dB)",
              [](const CellStats &c) { return c.si_sdr; }, 2);
  improvement("STOI improvement over noisy input",
              [](const CellStats &c) { return c.stoi; }, 3);
  os << "PESQ is not computed by this toolkit; its column is kept as a dash for layout.\n";
  return os.str();
}

Fig4Data ComputeFig4(const Utterance &u, const FrontalizedSequence &fs,
                     const DeformableModel &model) {
  const int T = u.T();
  Require(static_cast<int>(fs.frontal.size()) == T && static_cast<int>(u.observed.size()) == T &&
              static_cast<int>(u.unposed.size()) == T,
          ErrorCode::kMissingArtifacts, "landmark tracks have inconsistent lengths");
  const int j = MouthLayoutFor(model.J()).upper_lip;
  Fig4Data d;
  d.reference.resize(T, 2);
  d.raw.resize(T, 2);
  d.frontal.resize(T, 2);
  for (int t = 0; t < T; ++t) {
    d.reference.row(t) = u.unposed[t][j].head<2>().transpose();
    d.raw.row(t) = u.observed[t][j].head<2>().transpose();
    d.frontal.row(t) = fs.frontal[t][j].head<2>().transpose();
  }
  d.raw_rms = std::sqrt((d.raw - d.reference).rowwise().squaredNorm().mean());
  d.frontal_rms = std::sqrt((d.frontal - d.reference).rowwise().squaredNorm().mean());
  return d;
}

std::string Fig4Csv(const Fig4Data &d, const std::string &config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << "\n";
  os << "# raw_rms=" << Fixed(d.raw_rms, 9) << " frontal_rms=" << Fixed(d.frontal_rms, 9)
     << " ratio=" << Fixed(d.Ratio(), 4) << "\n";
  os << "frame,reference_x,reference_y,raw_x,raw_y,frontal_x,frontal_y\n";
  for (int t = 0; t < d.reference.rows(); ++t)
    os << t << "," << Fixed(d.reference(t, 0), 9) << "," << Fixed(d.reference(t, 1), 9) << ","
       << Fixed(d.raw(t, 0), 9) << "," << Fixed(d.raw(t, 1), 9) << ","
       << Fixed(d.frontal(t, 0), 9) << "," << Fixed(d.frontal(t, 1), 9) << "\n";
  return os.str();
}

}  // namespace avfront
