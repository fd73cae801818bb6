#include "sigcum/tree.hpp"

namespace sigcum {

template class FiniteTreeModel<double>;
template class FiniteTreeModel<Rational>;

}  // namespace sigcum
