#include <gtest/gtest.h>

#include <random>

#include "softact/csv.hpp"
#include "softact/svg.hpp"
#include "softact/synthetic_rig.hpp"
#include "svg_check.hpp"

using namespace softact;

TEST(Csv, FixedFormatting) {
  EXPECT_EQ(csv::fixed(1.0), "1.0000");
  EXPECT_EQ(csv::fixed(-0.00001), "0.0000");
  EXPECT_EQ(csv::fixed(-0.0), "0.0000");
  EXPECT_EQ(csv::fixed(-1.23456), "-1.2346");
  EXPECT_EQ(csv::fixed(-0.005, 6), "-0.005000");
}

TEST(Csv, MeasurementParseErrors) {
  EXPECT_THROW(csv::read_measurements(""), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape,pressure,trial,force\n"), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape_id,pressure_kpa,trial,force_n\ncircle,30,1\n"), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape_id,pressure_kpa,trial,force_n\ncircle,30x,1,5\n"), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape_id,pressure_kpa,trial,force_n\ncircle,30,1.5,5\n"), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape_id,pressure_kpa,trial,force_n\ncircle,30,1,-5\n"), ConfigError);
  EXPECT_THROW(csv::read_measurements("shape_id,pressure_kpa,trial,force_n\ncircle,0,1,5\n"), ConfigError);
}

TEST(Csv, CrlfAndComments) {
  const auto ds = csv::read_measurements("# hello\r\nshape_id,pressure_kpa,trial,force_n\r\ncircle,30,1,36.99\r\n\r\n");
  ASSERT_EQ(ds.records().size(), 1u);
  EXPECT_EQ(ds.records()[0].force_n, 36.99);
  EXPECT_EQ(ds.provenance(), std::vector<std::string>{"hello"});
}

TEST(Csv, MeasurementsRoundTripIsIdempotent) {
  // One write/read pass quantises to 4 decimals; after that the bytes are fixed.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto first = csv::write_measurements(generate_sweep(default_rig_config(seed)));
    const auto second = csv::write_measurements(csv::read_measurements(first));
    EXPECT_EQ(first, second);
    const auto original = generate_sweep(default_rig_config(seed));
    const auto back = csv::read_measurements(first);
    ASSERT_EQ(back.records().size(), original.records().size());
    for (std::size_t i = 0; i < back.records().size(); ++i)
      EXPECT_NEAR(back.records()[i].force_n, original.records()[i].force_n, 5e-5);
  }
}

TEST(Csv, TraceHeader) {
  const GaitSchedule rest{{{"rest", 1.0, {}}}};
  const auto text = csv::write_trace(run_gait_cycle(default_brace_layout(), rest, 0.1, 0.05));
  EXPECT_EQ(text.substr(0, text.find('\n')), csv::kTraceHeader);
  EXPECT_NE(text.find("0.0500,knee_medial,0.0000,0.0000,0.0000,0.0000\n"), std::string::npos);
}

TEST(Config, CrossSectionAndSpecRoundTrip) {
  for (const auto& cs : equal_area_family(25, 2))
    EXPECT_EQ(cross_section_from_json(parse_json(to_json(cs).dump())), cs);
  const CrossSection rr = RoundedRectangle{60, 40, 8};
  EXPECT_EQ(cross_section_from_json(to_json(rr)), rr);
  for (const auto& spec : {balloon_spec(), engineered_spec()})
    EXPECT_EQ(actuator_spec_from_json(parse_json(to_json(spec).dump())), spec);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_json("{"), ConfigError);
  EXPECT_THROW(cross_section_from_json(parse_json(R"({"kind": "hexagon"})")), ConfigError);
  EXPECT_THROW(cross_section_from_json(parse_json(R"({"kind": "circle"})")), ConfigError);
  EXPECT_THROW(cross_section_from_json(parse_json(R"({"kind": "circle", "radius_mm": "big"})")), ConfigError);
  EXPECT_THROW(cross_section_from_json(parse_json(R"({"kind": "circle", "radius_mm": -2})")), InvalidDimension);
  EXPECT_THROW(loss_model_from_json(parse_json(R"({"form": "cubic", "valid_range_kpa": [0, 1]})")), ConfigError);
  EXPECT_THROW(loss_model_from_json(parse_json(R"({"form": "linear", "slope_per_kpa": 0, "intercept": 0, "valid_range_kpa": [1]})")),
               ConfigError);
  EXPECT_THROW(shapes_from_json(parse_json(R"({"circle": {}})")), ConfigError);
  EXPECT_THROW(load_json_file("/nonexistent/file.json"), ConfigError);
}

TEST(Svg, OnePolylinePerSeries) {
  std::vector<svg::Series> series{{"a & b", {{0, 1}, {1, 2}}}, {"<c>", {{0, 0}, {2, 1}, {3, 5}}}, {"empty", {}}};
  const auto doc = svg::line_chart("t", "x", "y", series);
  EXPECT_TRUE(oracle::well_formed_xml(doc));
  EXPECT_EQ(oracle::count(doc, "<polyline"), 3u);
  EXPECT_NE(doc.find("a &amp; b"), std::string::npos);
  EXPECT_EQ(doc, svg::line_chart("t", "x", "y", series));
  EXPECT_TRUE(oracle::well_formed_xml(svg::line_chart("none", "x", "y", {})));
}

TEST(Svg, CheckerRejectsBrokenXml) {
  EXPECT_FALSE(oracle::well_formed_xml("<svg><g></svg>"));
  EXPECT_FALSE(oracle::well_formed_xml("<svg></svg><svg></svg>"));
  EXPECT_TRUE(oracle::well_formed_xml("<?xml version=\"1.0\"?><svg><g/></svg>"));
}
