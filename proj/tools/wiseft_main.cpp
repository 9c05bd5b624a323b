// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

int main() {
  std::puts("wiseft: not yet wired");
  return 1;
}
