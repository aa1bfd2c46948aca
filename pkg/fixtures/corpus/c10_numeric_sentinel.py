def rain():
    total = 0
    count = 0
    while True:
        try:
            value = float(input("Rainfall (-999 to stop): "))
        except ValueError:
            continue
        if value == -999:
            break
        if value < 0:
            continue
        total += value
        count += 1
    if count > 0:
        return total / count
    return 0

if __name__ == "__main__":
    print(rain())
