fn main() {
    // Restore default SIGPIPE handling so piping into `head` and friends
    // ends the process quietly instead of panicking on a closed stdout.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(grassde_cli::cli::cli_main(std::env::args_os()));
}
