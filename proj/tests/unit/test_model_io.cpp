#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rnncert/errors.hpp"
#include "rnncert/model_io.hpp"

using namespace rnncert;

namespace {

std::string error_of(const std::string& text) {
  try {
    model_from_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ModelIo, RoundTripPreservesEverything) {
  std::mt19937_64 gen(501);
  SynapticModel m;
  m.arch = Arch::Hopfield;
  m.domain = TimeDomain::Discrete;
  m.W = oracle::random_matrix(gen, 3, 3);
  m.B = oracle::random_matrix(gen, 3, 2);
  m.C = oracle::random_matrix(gen, 1, 3);
  m.D = oracle::random_matrix(gen, 1, 2);
  m.act = Activation::parse("leaky-relu:0.3");
  const SynapticModel back = model_from_text(model_to_text(m));
  EXPECT_EQ(back.arch, m.arch);
  EXPECT_EQ(back.domain, m.domain);
  EXPECT_EQ(back.act.tag(), m.act.tag());
  EXPECT_EQ((back.W - m.W).norm(), 0.0);
  EXPECT_EQ((back.B - m.B).norm(), 0.0);
  EXPECT_EQ((back.C - m.C).norm(), 0.0);
  EXPECT_EQ((back.D - m.D).norm(), 0.0);
}

TEST(ModelIo, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"n":2,"m":0,"p":0,"arch":"fr","time":"cts","activation":"tanh"})")
                .find("\"W\""),
            std::string::npos);
  const std::string rows = error_of(
      R"({"n":2,"m":0,"p":0,"arch":"fr","time":"cts","activation":"tanh","W":[[1,0],[0,1],[1,1]]})");
  EXPECT_NE(rows.find("W"), std::string::npos);
  EXPECT_NE(rows.find("3"), std::string::npos);
  EXPECT_NE(error_of(R"({"n":1,"m":0,"p":0,"arch":"lstm","time":"cts","activation":"tanh","W":[[0]]})")
                .find("arch"),
            std::string::npos);
  EXPECT_FALSE(error_of("{not json").empty());
}

TEST(ModelIo, GainsAndReferenceRoundTrip) {
  std::mt19937_64 gen(503);
  GainSet g;
  g.K_f = oracle::random_matrix(gen, 1, 2);
  g.L = oracle::random_matrix(gen, 2, 1);
  g.K_i = oracle::random_matrix(gen, 1, 1);
  g.epsilon = 0.01;
  g.c_K = 0.5;
  g.c_O = 0.4;
  g.c_r = 0.2;
  g.P_X = SymMatrix(oracle::random_spd(gen, 2));
  g.P_O = SymMatrix(oracle::random_spd(gen, 2));
  g.P_R = SymMatrix(oracle::random_spd(gen, 1));
  const GainSet back = gains_from_text(gains_to_text(g));
  EXPECT_EQ((back.K_f - g.K_f).norm(), 0.0);
  EXPECT_EQ((back.P_O.matrix() - g.P_O.matrix()).norm(), 0.0);
  EXPECT_DOUBLE_EQ(back.epsilon, 0.01);
  const PiecewiseConstant r = reference_from_text(R"({"starts":[0,4],"values":[[1,2],[3,4]]})");
  EXPECT_DOUBLE_EQ(r(5.0)(1), 4.0);
  EXPECT_THROW(reference_from_text(R"({"starts":[1],"values":[[1]]})"), InputError);
}

TEST(ModelIo, DeqSpecRoundTrip) {
  DeqSpec s;
  s.n = 2;
  s.d = Vector::Zero(2);
  s.Y = Matrix::Identity(2, 2);
  s.x_map.layers = {{Matrix::Ones(4, 1), Vector::Zero(4), Activation(ActivationKind::Tanh)}};
  s.b_map.layers = {{Matrix::Ones(2, 1), Vector::Ones(2), {}}};
  const DeqSpec back = deq_from_text(deq_to_text(s));
  EXPECT_EQ(back.n, 2);
  ASSERT_EQ(back.x_map.layers.size(), 1u);
  EXPECT_TRUE(back.x_map.layers[0].act.has_value());
  EXPECT_FALSE(back.b_map.layers[0].act.has_value());
  EXPECT_NO_THROW(back.validate());
}

TEST(ModelIo, InterconnectionAndGraphFiles) {
  const std::string sub =
      R"({"n":1,"m":1,"p":1,"arch":"fr","time":"cts","activation":"tanh","W":[[0.1]],"B":[[1]],"C":[[1]],"D":[[0]]})";
  const Interconnection ic =
      interconnection_from_text(R"({"subsystems":[)" + sub + "," + sub + R"(],"coupling":[[0,0.5],[0.5,0]]})");
  EXPECT_EQ(ic.subsystems.size(), 2u);
  EXPECT_DOUBLE_EQ(ic.coupling(0, 1), 0.5);
  const GraphFile g = graph_from_text(
      R"({"W":[[0.1]],"B":[[1]],"A":[[0.5,0.5],[0.5,0.5]],"activation":"tanh"})");
  EXPECT_EQ(g.U.cols(), 2);
  EXPECT_EQ(g.X0.rows(), 1);
  EXPECT_EQ(g.variant.kind, GraphVariant::Kind::Undirected);
}
