#include "sigcum/path.hpp"

namespace sigcum {

template class CadlagPath<double>;
template class CadlagPath<Rational>;

}  // namespace sigcum
