// Acceptance suite placeholder; the full criteria runner lands after the
// modules stabilize.
int main() { return 0; }
