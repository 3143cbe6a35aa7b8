#include "check.hpp"

using namespace plcheck::testing;

TEST_CASE("normalization is idempotent") { require_property(find_property("normalization idempotence"), 21); }
TEST_CASE("normalization preserves meaning and detects emptiness") {
  require_property(find_property("normalization semantic preservation"), 22);
}
TEST_CASE("subclass closure equals path search") { require_property(find_property("subclass closure"), 23); }
TEST_CASE("disjointness is symmetric and inherited") { require_property(find_property("disjointness laws"), 24); }
