from aphidsim.cli import main

main()
