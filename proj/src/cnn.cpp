#include "mdradar/cnn.hpp"

namespace mdradar {

std::vector<ConvSpec> canonical_conv_specs() {
  return {
      {21, 1, 1, 16},
      {16, 1, 1, 32},
      {4, 1, 1, 64},
  };
}

}  // namespace mdradar
