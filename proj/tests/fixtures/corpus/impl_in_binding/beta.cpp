#include "beta.h"

#include <pybind11/pybind11.h>

int boost(int v) { return v * 3; }

PYBIND11_MODULE(beta, m) {
    m.def("boost", &boost);
}
