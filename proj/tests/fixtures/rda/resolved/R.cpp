#include <string>

int g(int v);

PYBIND11_MODULE(R, m) {
    std::string n = "g";
    m.def(n, &g);
}
