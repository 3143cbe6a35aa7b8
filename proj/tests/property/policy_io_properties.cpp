#include "check.hpp"

using namespace plcheck::testing;

TEST_CASE("serialized policies parse back to the same AST") {
  require_property(find_property("parse/serialize round trip"), 41);
}
