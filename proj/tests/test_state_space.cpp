#include <doctest.h>

#include <limits>

#include "drkf/errors.hpp"
#include "test_models.hpp"

using namespace drkf;

TEST_CASE("validated accepts the standard models") {
    CHECK_NOTHROW(testing::scalar_model());
    CHECK_NOTHROW(testing::tracking_model());
    const auto m = testing::tracking_model();
    CHECK(m.dx() == 2);
    CHECK(m.dw() == 1);
    CHECK(m.dy() == 1);
    CHECK(m.ds() == 1);
    CHECK(m.xi_dim(10) == 2 + 9 + 10);
}

TEST_CASE("dimension and finiteness violations are rejected") {
    MatXd one = MatXd::Constant(1, 1, 1.0);
    MatXd bad23 = MatXd::Zero(2, 3);
    CHECK_THROWS_AS(StateSpaceModel::validated(bad23, one, one, one), ModelError);
    CHECK_THROWS_AS(StateSpaceModel::validated(one, MatXd::Zero(2, 1), one, one), ModelError);
    MatXd nan1 = MatXd::Constant(1, 1, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(StateSpaceModel::validated(nan1, one, one, one), ModelError);
}

TEST_CASE("controllability and detectability rank tests") {
    MatXd one = MatXd::Constant(1, 1, 1.0);
    MatXd zero = MatXd::Zero(1, 1);

    // B = 0: uncontrollable
    CHECK_THROWS_AS(StateSpaceModel::validated(one, zero, one, one), ModelError);
    CHECK_FALSE(is_controllable(one, zero));

    // unstable unobserved mode: not detectable
    MatXd two = MatXd::Constant(1, 1, 2.0);
    CHECK_THROWS_AS(StateSpaceModel::validated(two, one, zero, one), ModelError);
    CHECK_FALSE(is_detectable(two, zero));

    // a stable unobserved mode is still detectable
    MatXd half = MatXd::Constant(1, 1, 0.5);
    CHECK(is_detectable(half, zero));

    const auto t = testing::tracking_model();
    CHECK(is_controllable(t.A, t.B));
    CHECK(is_detectable(t.A, t.Cy));

    // two decoupled integrators, one invisible: PBH fails at lambda = 1
    MatXd A(2, 2);
    A << 1, 0, 0, 1;
    MatXd B(2, 1);
    B << 1, 1;
    MatXd Cy(1, 2);
    Cy << 1, 0;
    CHECK_FALSE(is_detectable(A, Cy));
}

TEST_CASE("JSON ingestion round trip") {
    const auto m = testing::tracking_model();
    const auto m2 = StateSpaceModel::from_json_text(m.to_json_text());
    CHECK((m.A - m2.A).norm() == 0.0);
    CHECK((m.B - m2.B).norm() == 0.0);
    CHECK((m.Cy - m2.Cy).norm() == 0.0);
    CHECK((m.Cs - m2.Cs).norm() == 0.0);
}

TEST_CASE("JSON ingestion rejects malformed documents") {
    CHECK_THROWS_AS(StateSpaceModel::from_json_text("not json"), ModelError);
    CHECK_THROWS_AS(StateSpaceModel::from_json_text(R"({"A":[[1]],"B":[[1]],"C_y":[[1]]})"),
                    ModelError);
    CHECK_THROWS_AS(
        StateSpaceModel::from_json_text(R"({"A":[[1],[2,3]],"B":[[1]],"C_y":[[1]],"C_s":[[1]]})"),
        ModelError);
    CHECK_THROWS_AS(
        StateSpaceModel::from_json_text(R"({"A":[["x"]],"B":[[1]],"C_y":[[1]],"C_s":[[1]]})"),
        ModelError);
}
