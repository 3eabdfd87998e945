#include "gpdistill/errors.hpp"

namespace gpdistill {

void rethrow_with_step(int step) {
  try {
    throw;
  } catch (NumericalError& e) {
    if (!e.step) e.step = step;
    throw;
  }
}

}  // namespace gpdistill
