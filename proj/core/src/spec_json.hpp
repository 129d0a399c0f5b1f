#pragma once

#include "json_util.hpp"
#include "lipgan/mlp.hpp"

namespace lipgan::detail {

inline json constraint_json(const Constraint& c) {
  json j;
  j["mode"] = std::string(to_string(c.mode));
  if (c.mode == ConstraintMode::Bjorck) {
    j["steps"] = c.bjorck_steps;
    j["order"] = c.bjorck_order;
  }
  if (c.mode == ConstraintMode::Clip) j["c"] = c.clip;
  return j;
}

inline Constraint constraint_from_json(const StrictObject& o) {
  o.allow_only({"mode", "steps", "order", "c"});
  Constraint c;
  c.mode = parse_constraint_mode(o.get<std::string>("mode"));
  c.bjorck_steps = o.get_or<int>("steps", c.bjorck_steps);
  c.bjorck_order = o.get_or<int>("order", c.bjorck_order);
  c.clip = o.get_or<double>("c", c.clip);
  return c;
}

inline json spec_json(const MlpSpec& s) {
  json j;
  j["input_dim"] = s.input_dim;
  j["output_dim"] = s.output_dim;
  j["width"] = s.width;
  j["depth"] = s.depth;
  j["hidden_activation"] = std::string(to_string(s.hidden));
  j["output_activation"] = std::string(to_string(s.output));
  j["constraint"] = constraint_json(s.constraint);
  return j;
}

inline MlpSpec spec_from_json(const StrictObject& o) {
  o.allow_only({"input_dim", "output_dim", "width", "depth", "hidden_activation",
                "output_activation", "constraint"});
  MlpSpec s;
  s.input_dim = o.get<std::size_t>("input_dim");
  s.output_dim = o.get<std::size_t>("output_dim");
  s.width = o.get<std::size_t>("width");
  s.depth = o.get<std::size_t>("depth");
  s.hidden = parse_hidden_activation(o.get<std::string>("hidden_activation"));
  s.output = parse_output_activation(o.get<std::string>("output_activation"));
  s.constraint = constraint_from_json(o.object("constraint"));
  return s;
}

}  // namespace lipgan::detail
