fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("cargo:rerun-if-changed=build.rs");
    println!("cargo:rerun-if-changed=src/lib.rs");

    #[cfg(feature = "gen-header")]
    {
        let crate_dir = std::env::var("CARGO_MANIFEST_DIR")?;
        let config = cbindgen::Config::from_file(format!("{crate_dir}/cbindgen.toml"))?;
        cbindgen::generate_with_config(&crate_dir, config)?.write_to_file(format!("{crate_dir}/include/circle_subgroups.h"));
    }

    Ok(())
}
