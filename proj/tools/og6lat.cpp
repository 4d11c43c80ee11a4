#include <og6lat/lattice.hpp>
int main() { return 0; }
