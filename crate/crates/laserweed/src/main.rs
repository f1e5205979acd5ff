fn main() {
    // CLI wiring lands once the library modules are in place.
}
