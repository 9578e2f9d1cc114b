#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "ckern/graph.hpp"
#include "ckern/io.hpp"

using namespace ckern;

namespace {

const std::string kSamples = CKERN_SAMPLES;

}  // namespace

TEST(Format, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(io::format_double(1.0), "1");
}

TEST(Digest, DeterministicAndSensitive) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_NE(io::fnv1a_hex("ab"), io::fnv1a_hex("ba"));
}

TEST(Csv, ParsesAndRoundTrips) {
  const Matrix m = io::parse_matrix_csv("# swap\n0, 1\n\n1,0\r\n");
  Matrix want(2, 2);
  want << 0, 1, 1, 0;
  EXPECT_EQ(m, want);
  const Matrix r = rotation(0.37);
  EXPECT_EQ(io::parse_matrix_csv(io::matrix_to_csv(r)), r);
}

TEST(Csv, Rejects) {
  EXPECT_THROW(io::parse_matrix_csv(""), schema_error);
  EXPECT_THROW(io::parse_matrix_csv("# only a comment\n"), schema_error);
  EXPECT_THROW(io::parse_matrix_csv("1,2\n3\n"), schema_error);
  EXPECT_THROW(io::parse_matrix_csv("1,x\n"), schema_error);
  EXPECT_THROW(io::parse_matrix_csv("1,2z\n"), schema_error);
}

TEST(MatrixSpec, Shorthands) {
  EXPECT_EQ(io::parse_matrix_spec("rotation:0.5"), rotation(0.5));
  EXPECT_EQ(io::parse_matrix_spec("identity:3"), identity(3));
  EXPECT_EQ(io::parse_matrix_spec("scalar:-1"), Matrix::Constant(1, 1, -1.0));
  EXPECT_EQ(io::parse_matrix_spec(kSamples + "/swap.csv")(0, 1), 1.0);
  EXPECT_THROW(io::parse_matrix_spec("rotation:abc"), schema_error);
  EXPECT_THROW(io::parse_matrix_spec(kSamples + "/no_such.csv"), io_error);
}

TEST(GraphJson, SamplesLoad) {
  const auto tri = io::load_graph(kSamples + "/triangle_twisted.json");
  EXPECT_EQ(tri.graph.vertex_count(), 3u);
  EXPECT_EQ(tri.graph.edge_count(), 3u);
  EXPECT_EQ(tri.graph.edges()[1].weight, 0.5);
  EXPECT_TRUE(tri.reverses.empty());
  EXPECT_TRUE(validate(tri.graph).ok());

  const auto sq = io::load_graph(kSamples + "/square_balanced.json");
  EXPECT_EQ(sq.graph.id(2), "2");
  EXPECT_TRUE(is_consistent(sq.graph).consistent);

  const auto bad = io::load_graph(kSamples + "/bad_inverse.json");
  ASSERT_EQ(bad.reverses.size(), 1u);
  EXPECT_FALSE(validate(bad.graph, bad.reverses).ok());
}

TEST(GraphJson, Defaults) {
  const auto doc = io::parse_graph(R"({"dim": 2, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b"}]})");
  EXPECT_EQ(doc.graph.edges()[0].weight, 1.0);
  EXPECT_EQ(doc.graph.edges()[0].sigma_uv, identity(2));
}

TEST(GraphJson, RoundTrip) {
  const auto g = io::load_graph(kSamples + "/triangle_twisted.json").graph;
  const auto back = io::graph_from_json(io::graph_to_json(g)).graph;
  ASSERT_EQ(back.edge_count(), g.edge_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    EXPECT_EQ(back.edges()[i].sigma_uv, g.edges()[i].sigma_uv);
    EXPECT_EQ(back.edges()[i].weight, g.edges()[i].weight);
  }
  EXPECT_EQ(back.vertex_ids(), g.vertex_ids());
}

TEST(GraphJson, SchemaErrors) {
  const char* bad[] = {
      R"([1, 2])",
      R"({"dim": 2, "vertices": ["a"]})",
      R"({"dim": 0, "vertices": [], "edges": []})",
      R"({"dim": 1.5, "vertices": [], "edges": []})",
      R"({"dim": 1, "vertices": ["a", "a"], "edges": []})",
      R"({"dim": 1, "vertices": [true], "edges": []})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a"}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "c"}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "a"}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b"}, {"u": "b", "v": "a"}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "w": "heavy"}]})",
      R"({"dim": 2, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "sigma_uv": [[1, 0], [0]]}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "sigma_uv": [["1"]]}]})",
      R"({"dim": 1, "vertices": ["a", "b"], "edges": [)",
  };
  for (const char* text : bad) EXPECT_THROW(io::parse_graph(text), schema_error) << text;
}

TEST(GraphJson, WrongShapeLeftToValidation) {
  const auto doc = io::parse_graph(R"({"dim": 2, "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "sigma_uv": [[1]]}]})");
  EXPECT_FALSE(validate(doc.graph).ok());
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(io::read_file(kSamples + "/absent.json"), io_error);
  EXPECT_THROW(io::load_graph(kSamples + "/absent.json"), io_error);
}
