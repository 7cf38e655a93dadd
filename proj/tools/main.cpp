#include <cstdio>

int cli_stub_main();

int main() {
  std::printf("hairsplat: CLI not wired yet\n");
  return 1;
}
