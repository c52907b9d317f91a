#include "gpt/io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gpt::io {

using nlohmann::json;

namespace {

double parse_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number_text(j.get<std::string>());
  throw std::invalid_argument("expected a number or numeric string, got " + j.dump());
}

json number_json(double value) { return json(format_number(value)); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

Eigen::VectorXd parse_vector(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of numbers");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = parse_number(j[static_cast<std::size_t>(i)]);
  return v;
}

json real_matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

Eigen::MatrixXd parse_real_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a matrix");
  const int rows = static_cast<int>(j.size());
  Eigen::VectorXd first = parse_vector(j[0]);
  Eigen::MatrixXd m(rows, first.size());
  m.row(0) = first.transpose();
  for (int r = 1; r < rows; ++r) {
    const Eigen::VectorXd row = parse_vector(j[static_cast<std::size_t>(r)]);
    if (row.size() != m.cols()) throw std::invalid_argument("ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

json herm_json(const HermMat& m) {
  json out = json::array();
  for (int r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.dim(); ++c) {
      row.push_back(json::array({number_json(m.mat()(r, c).real()),
                                 number_json(m.mat()(r, c).imag())}));
    }
    out.push_back(std::move(row));
  }
  return out;
}

json effect_json(const Effect& e) {
  return json{{"coeffs", vector_json(e.coeffs())}, {"const", number_json(e.constant())}};
}

Effect parse_effect(const json& j) {
  if (!j.contains("coeffs")) throw std::invalid_argument("effect missing 'coeffs'");
  const double c = j.contains("const") ? parse_number(j.at("const")) : 0.0;
  return Effect(parse_vector(j.at("coeffs")), c);
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("malformed JSON");
  return j;
}

}  // namespace

double parse_number_text(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    std::size_t pn = 0, pd = 0;
    double n = 0.0, d = 0.0;
    try {
      n = std::stod(num, &pn);
      d = std::stod(den, &pd);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad rational '" + text + "'");
    }
    if (pn != num.size() || pd != den.size() || d == 0.0) {
      throw std::invalid_argument("bad rational '" + text + "'");
    }
    return n / d;
  }
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + text + "'");
  }
  if (pos != text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string space_to_json(const StateSpace& space) {
  json j;
  if (space.is_polytope()) {
    j["kind"] = "polytope";
    j["dim"] = space.ambient_dim();
    j["unit"] = vector_json(space.unit());
    j["vertices"] = real_matrix_json(space.vertices());
    j["name"] = space.name();
  } else {
    j["kind"] = "matrix";
    j["hilbert_dims"] = space.model().hilbert_dims;
    j["model"] = space.name();
  }
  return j.dump(2);
}

SpacePtr space_from_json(const std::string& text) {
  const json j = parse_text(text);
  const std::string kind = j.value("kind", "");
  if (kind == "polytope") {
    const int dim = j.at("dim").get<int>();
    Eigen::VectorXd unit = parse_vector(j.at("unit"));
    Eigen::MatrixXd vertices = parse_real_matrix(j.at("vertices"));
    if (unit.size() != dim || vertices.cols() != dim) {
      throw std::invalid_argument("space_from_json: dimension mismatch");
    }
    return StateSpace::polytope(j.value("name", "polytope"), std::move(vertices),
                                std::move(unit));
  }
  if (kind == "matrix") {
    const SpacePtr space = parse_model(j.at("model").get<std::string>());
    if (j.contains("hilbert_dims")) {
      const auto dims = j.at("hilbert_dims").get<std::vector<int>>();
      if (dims != space->model().hilbert_dims) {
        throw std::invalid_argument("space_from_json: hilbert_dims do not match model");
      }
    }
    return space;
  }
  throw std::invalid_argument("space_from_json: unknown kind '" + kind + "'");
}

std::string instrument_to_json(const GenericInstrument& instr) {
  json events = json::array();
  for (int j = 0; j < instr.num_outcomes(); ++j) {
    events.push_back(json{{"matrix", real_matrix_json(instr.event(j))},
                          {"offset", vector_json(Eigen::VectorXd::Zero(
                              instr.space()->ambient_dim()))}});
  }
  return json{{"kind", "generic"}, {"events", std::move(events)}}.dump(2);
}

std::string instrument_to_json(const MPPInstrument& instr) {
  json effects = json::array();
  json outputs = json::array();
  for (int j = 0; j < instr.num_outcomes(); ++j) {
    effects.push_back(effect_json(instr.effect(j)));
    outputs.push_back(vector_json(instr.output(j).coords()));
  }
  return json{{"kind", "mpp"}, {"effects", std::move(effects)},
              {"outputs", std::move(outputs)}}
      .dump(2);
}

GenericInstrument instrument_from_json(const std::string& text, const SpacePtr& space) {
  const json j = parse_text(text);
  const std::string kind = j.value("kind", "");
  if (kind == "generic") {
    std::vector<AffineMap> events;
    for (const auto& ev : j.at("events")) {
      AffineMap map;
      map.linear = parse_real_matrix(ev.at("matrix"));
      map.offset = ev.contains("offset") ? parse_vector(ev.at("offset"))
                                         : Eigen::VectorXd::Zero(space->ambient_dim());
      events.push_back(std::move(map));
    }
    return GenericInstrument(space, events);
  }
  if (kind == "mpp") {
    Measurement effects;
    for (const auto& e : j.at("effects")) effects.push_back(parse_effect(e));
    std::vector<State> outputs;
    for (const auto& o : j.at("outputs")) outputs.push_back(State(parse_vector(o), space));
    return measure_and_prepare(space, effects, outputs);
  }
  throw std::invalid_argument("instrument_from_json: unknown kind '" + kind + "'");
}

std::string fixture_to_json(const OmegaBarFixture& fixture) {
  json j;
  j["model"] = fixture.space->name();
  j["rho1"] = herm_json(fixture.rho1);
  j["rho2"] = herm_json(fixture.rho2);
  j["sigma1"] = herm_json(fixture.sigma1);
  j["sigma2"] = herm_json(fixture.sigma2);
  j["e1"] = herm_json(fixture.op_e1);
  j["e2"] = herm_json(fixture.op_e2);
  j["rho_mix"] = herm_json(fixture.rho_mix);
  j["decomp_q_probs"] = vector_json(fixture.decomp_q.probs);
  j["decomp_p_probs"] = vector_json(fixture.decomp_p.probs);
  return j.dump(2);
}

std::string cycle_report_to_json(const CycleReport& report) {
  json j;
  j["W_separation"] = number_json(report.W_separation);
  j["W_mixing"] = number_json(report.W_mixing);
  j["delta_W"] = number_json(report.delta_W);
  j["N"] = report.N;
  j["T"] = number_json(report.T);
  j["k_B"] = number_json(report.k_B);
  return j.dump(2);
}

std::string decomposition_set_to_json(const DecompositionSet& set) {
  json decomps = json::array();
  for (const auto& d : set.decompositions) {
    json states = json::array();
    for (const auto& s : d.states) states.push_back(vector_json(s.coords()));
    decomps.push_back(json{{"probs", vector_json(d.probs)}, {"states", std::move(states)}});
  }
  json j;
  j["target"] = vector_json(set.target.coords());
  j["decompositions"] = std::move(decomps);
  j["complete"] = set.complete;
  j["skipped_dependent"] = set.skipped_dependent;
  return j.dump(2);
}

}  // namespace gpt::io
