#include <cstdio>

int main() {
  std::puts("tempord: CLI not wired up yet");
  return 0;
}
