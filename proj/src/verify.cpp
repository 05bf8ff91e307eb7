#include "foxcalc/intmat.hpp"
