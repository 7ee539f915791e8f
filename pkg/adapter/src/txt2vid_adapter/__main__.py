from txt2vid_adapter.cli import main

main()
