#include <cstdio>

int main() {
    std::puts("sandlab: subcommands arrive with the harness build");
    return 0;
}
