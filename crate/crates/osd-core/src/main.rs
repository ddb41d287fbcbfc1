fn main() {
    std::process::exit(osd_core::run_cli());
}
