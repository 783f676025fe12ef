// C++ functions for module B
#include <pybind11/pybind11.h>

int f(int a);

int square(int a) { return a * a; }

int f(int a) { return square(a); }

PYBIND11_MODULE(B, m) {
    m.def("f", &f);
}
